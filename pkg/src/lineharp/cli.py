"""Command-line front door: generate, render, analyze, serve.

Every flag can also come from the LINEHARP_* environment namespace, e.g.
--decay-base <-> LINEHARP_DECAY_BASE. Exit codes: 0 success, 2 usage or
input error, 3 validation error.
"""

from __future__ import annotations

import argparse
import json
import os
import socket
import sys
from pathlib import Path

from .analysis import (
    contour_to_csv,
    detect_onsets,
    onsets_to_json,
    pitch_contour,
    rms_envelope,
    rms_to_csv,
)
from .audio_io import RenderSpec, decode_wav, events_to_jsonl, render_offline
from .mapping import MappingConfig
from .model import (
    PRESETS,
    DatasetParseError,
    ValidationError,
    generate_dataset,
    load_lineset_file,
    save_lineset,
)
from .session import TrajectoryError, parse_trajectory

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3


def _env(name: str, fallback=None):
    return os.environ.get(f"LINEHARP_{name}", fallback)


def _add_mapping_flags(p: argparse.ArgumentParser) -> None:
    defaults = MappingConfig()
    p.add_argument("--f-min", type=float, default=_env("F_MIN", defaults.f_min),
                   help=f"lowest mapped frequency in Hz (default {defaults.f_min:g})")
    p.add_argument("--f-max", type=float, default=_env("F_MAX", defaults.f_max),
                   help=f"highest mapped frequency in Hz (default {defaults.f_max:g})")
    p.add_argument("--attack", type=float, default=_env("ATTACK", defaults.attack),
                   help=f"attack time in seconds (default {defaults.attack:g})")
    p.add_argument("--decay-base", type=float, default=_env("DECAY_BASE", defaults.decay_base),
                   help=f"base decay in seconds (default {defaults.decay_base:g})")
    p.add_argument("--decay-min", type=float, default=_env("DECAY_MIN", defaults.decay_min),
                   help=f"decay floor in seconds (default {defaults.decay_min:g})")
    p.add_argument("--amp-floor", type=float, default=_env("AMP_FLOOR", defaults.amp_floor),
                   help=f"amplitude floor for beta=0 (default {defaults.amp_floor:g})")


def _mapping_from_args(args) -> MappingConfig:
    return MappingConfig(
        f_min=float(args.f_min),
        f_max=float(args.f_max),
        attack=float(args.attack),
        decay_base=float(args.decay_base),
        decay_min=float(args.decay_min),
        amp_floor=float(args.amp_floor),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lineharp",
        description="Sonify dense line charts: generate datasets, render "
        "scripted sessions to WAV, analyze audio, or serve the interactive UI.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic benchmark dataset")
    g.add_argument("--preset", default=_env("PRESET"), required=_env("PRESET") is None,
                   help=f"one of {', '.join(PRESETS)}")
    g.add_argument("--seed", type=int, default=int(_env("SEED", 0)), help="RNG seed (default 0)")
    g.add_argument("--out", default=_env("OUT"), required=_env("OUT") is None,
                   help="output dataset JSON path")

    r = sub.add_parser("render", help="render a dataset + trajectory to WAV")
    r.add_argument("--data", default=_env("DATA"), required=_env("DATA") is None,
                   help="dataset JSON path")
    r.add_argument("--trajectory", default=_env("TRAJECTORY"),
                   required=_env("TRAJECTORY") is None, help="trajectory JSON path")
    r.add_argument("--out", default=_env("OUT"), required=_env("OUT") is None,
                   help="output WAV path (events go to <out>.events.jsonl)")
    r.add_argument("--sr", type=int, default=int(_env("SR", 44100)),
                   help="sample rate: 44100 or 48000 (default 44100)")
    r.add_argument("--block", type=int, default=int(_env("BLOCK", 256)),
                   help="render block frames, power of two in [64, 4096] (default 256)")
    r.add_argument("--format", default=_env("FORMAT", "pcm16"), choices=("pcm16", "float32"),
                   help="sample format (default pcm16)")
    r.add_argument("--duration", type=float, default=_env("DURATION"),
                   help="force output duration in seconds (default: until silence)")
    r.add_argument("--master-gain", type=float, default=_env("MASTER_GAIN"),
                   help="output master gain (default 0.9)")
    r.add_argument("--no-dynamic-scaling", action="store_true",
                   default=_env("NO_DYNAMIC_SCALING", "") not in ("", "0", "false"),
                   help="disable dynamic amplitude/decay scaling (clipping ablation)")
    _add_mapping_flags(r)

    a = sub.add_parser("analyze", help="extract f0 contour, RMS envelope, and onsets")
    a.add_argument("--wav", default=_env("WAV"), required=_env("WAV") is None,
                   help="input WAV path (mono pcm16 or float32)")
    a.add_argument("--out-prefix", default=_env("OUT_PREFIX"),
                   required=_env("OUT_PREFIX") is None,
                   help="writes <prefix>.f0.csv, <prefix>.rms.csv, <prefix>.onsets.json")

    s = sub.add_parser("serve", help="serve the interactive session over WebSocket")
    s.add_argument("--data", default=_env("DATA"), required=_env("DATA") is None,
                   help="dataset JSON path")
    s.add_argument("--port", type=int, default=int(_env("PORT", 8765)),
                   help="TCP port (default 8765)")
    s.add_argument("--host", default=_env("HOST", "127.0.0.1"),
                   help="bind address (default 127.0.0.1)")
    s.add_argument("--sr", type=int, default=int(_env("SR", 44100)),
                   help="sample rate: 44100 or 48000 (default 44100)")
    s.add_argument("--block", type=int, default=int(_env("BLOCK", 256)),
                   help="stream block frames (default 256)")
    s.add_argument("--static-dir", default=_env("STATIC_DIR"),
                   help="optional directory of UI assets to serve at /")
    _add_mapping_flags(s)

    return parser


def cmd_generate(args) -> int:
    try:
        dataset = generate_dataset(args.preset, args.seed)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    Path(args.out).write_bytes(save_lineset(dataset))
    print(f"wrote {args.out}: {len(dataset)} lines (preset={args.preset}, seed={args.seed})")
    return EXIT_OK


def cmd_render(args) -> int:
    try:
        dataset = load_lineset_file(args.data)
        trajectory = parse_trajectory(Path(args.trajectory).read_bytes())
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DatasetParseError, TrajectoryError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        cfg = _mapping_from_args(args)
        spec = RenderSpec(
            sample_rate=args.sr,
            block_frames=args.block,
            duration=None if args.duration is None else float(args.duration),
            format=args.format,
        )
        master = None if args.master_gain is None else float(args.master_gain)
        wav, log, stats = render_offline(
            dataset,
            trajectory,
            cfg,
            spec,
            scaling_enabled=not args.no_dynamic_scaling,
            master_gain=master,
        )
    except (ValueError, ValidationError) as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    out = Path(args.out)
    out.write_bytes(wav)
    events_path = Path(str(out) + ".events.jsonl")
    events_path.write_text(events_to_jsonl(log), encoding="utf-8")
    plucks = sum(1 for e in log if e.get("type") == "pluck")
    print(
        f"wrote {out} ({len(wav)} bytes) and {events_path}; "
        f"{plucks} plucks, clip_samples={stats['clip_samples']}, "
        f"notes_dropped={stats['notes_dropped']}"
    )
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        data = Path(args.wav).read_bytes()
        samples, sr = decode_wav(data)
    except (FileNotFoundError, ValueError) as e:
        print(f"error: unreadable WAV: {e}", file=sys.stderr)
        return EXIT_USAGE
    prefix = args.out_prefix
    try:
        contour = pitch_contour(samples, sr)
    except ValueError:
        from .analysis import PitchContour

        contour = PitchContour(frames=[])
    Path(f"{prefix}.f0.csv").write_text(contour_to_csv(contour), encoding="utf-8")
    Path(f"{prefix}.rms.csv").write_text(
        rms_to_csv(rms_envelope(samples, sr)), encoding="utf-8"
    )
    onsets = detect_onsets(samples, sr)
    Path(f"{prefix}.onsets.json").write_text(onsets_to_json(onsets), encoding="utf-8")
    voiced = len(contour.voiced())
    print(
        f"wrote {prefix}.f0.csv ({voiced} voiced frames), {prefix}.rms.csv, "
        f"{prefix}.onsets.json ({len(onsets)} onsets)"
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    try:
        dataset = load_lineset_file(args.data)
        cfg = _mapping_from_args(args)
        cfg.validate_for_sample_rate(args.sr)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DatasetParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, ValueError) as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION

    # probe the port before booting the app so a busy port fails fast
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as e:
        print(f"error: cannot bind {args.host}:{args.port}: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        probe.close()

    import uvicorn

    from .service import create_app

    app = create_app(
        dataset,
        cfg,
        sample_rate=args.sr,
        block_frames=args.block,
        static_dir=args.static_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {
        "generate": cmd_generate,
        "render": cmd_render,
        "analyze": cmd_analyze,
        "serve": cmd_serve,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
