"""lineharp: pluck dense line charts with the cursor and hear the data.

Line direction maps to pitch, importance to loudness; crossings triggered by
cursor movement become plucked-string chords with clip-safe dynamic mixing,
an importance lens for filtering and sequenced playback, offline WAV
rendering, and audio-analysis oracles.
"""

from .analysis import PitchContour, detect_onsets, pitch_contour, rms_envelope
from .audio_io import RenderSpec, decode_wav, encode_wav, render_offline, stream_realtime
from .geometry import (
    Crossing,
    CursorMove,
    Lens,
    find_crossings,
    lens_contents,
    lens_displacement,
    segment_angle,
)
from .mapping import (
    MappingConfig,
    Note,
    angle_to_frequency,
    importance_to_amplitude,
    make_note,
)
from .mixer import ActiveNoteBuffer
from .model import (
    CurveSample,
    DatasetParseError,
    LineSet,
    Point2,
    Polyline,
    ValidationError,
    generate_dataset,
    load_lineset,
    sample_curve,
    save_lineset,
)
from .session import (
    PluckFeedback,
    Session,
    Trajectory,
    TrajectoryEvent,
    make_sweep,
    parse_trajectory,
    trajectory_to_json,
)
from .synth import Voice, render_voice, spawn_voice

__version__ = "0.1.0"

__all__ = [
    "ActiveNoteBuffer",
    "Crossing",
    "CursorMove",
    "CurveSample",
    "DatasetParseError",
    "Lens",
    "LineSet",
    "MappingConfig",
    "Note",
    "PitchContour",
    "PluckFeedback",
    "Point2",
    "Polyline",
    "RenderSpec",
    "Session",
    "Trajectory",
    "TrajectoryEvent",
    "ValidationError",
    "Voice",
    "angle_to_frequency",
    "decode_wav",
    "detect_onsets",
    "encode_wav",
    "find_crossings",
    "generate_dataset",
    "importance_to_amplitude",
    "lens_contents",
    "lens_displacement",
    "load_lineset",
    "make_note",
    "make_sweep",
    "parse_trajectory",
    "pitch_contour",
    "render_offline",
    "render_voice",
    "rms_envelope",
    "sample_curve",
    "save_lineset",
    "segment_angle",
    "spawn_voice",
    "stream_realtime",
    "trajectory_to_json",
]
