import numpy as np
import pytest

from lineharp.analysis import rms_envelope
from lineharp.mapping import MappingConfig, Note
from lineharp.mixer import ActiveNoteBuffer, render_block, set_scaling_enabled, trigger

SR = 44100
BLOCK = 256


def _note(amp=1.0, freq=440.0, line_id=0, onset=0.0, decay=0.8):
    return Note(frequency=freq, amplitude=amp, decay=decay, line_id=line_id, onset=onset)


def _mixer(**kwargs):
    return ActiveNoteBuffer(SR, **kwargs)


def test_chord_normalized_when_sum_exceeds_one():
    mixer = _mixer()
    trigger(mixer, [_note(0.8, line_id=0), _note(0.8, line_id=1)])
    render_block(mixer, BLOCK)
    assert mixer.live_gains() == pytest.approx([0.5, 0.5])
    assert mixer.cumulative_amplitude == pytest.approx(1.6)


def test_quiet_solo_note_passes_through():
    mixer = _mixer()
    trigger(mixer, [_note(0.3)])
    render_block(mixer, BLOCK)
    assert mixer.live_gains() == pytest.approx([0.3])
    assert mixer.live_decays() == pytest.approx([0.8])


def test_twenty_note_chord_hits_decay_floor():
    mixer = _mixer()
    trigger(mixer, [_note(1.0, line_id=i) for i in range(20)])
    render_block(mixer, BLOCK)
    assert mixer.live_decays() == pytest.approx([max(0.06, 0.8 / 20)] * 20)
    assert mixer.live_decays()[0] == pytest.approx(0.06)


def test_gain_ratios_preserve_amplitude_ratios():
    mixer = _mixer()
    trigger(mixer, [_note(1.0, line_id=0), _note(0.5, line_id=1), _note(0.25, line_id=2)])
    render_block(mixer, BLOCK)
    g = mixer.live_gains()
    assert g[0] / g[1] == pytest.approx(2.0)
    assert g[1] / g[2] == pytest.approx(2.0)


def test_later_chord_does_not_rescale_live_voices():
    mixer = _mixer()
    trigger(mixer, [_note(0.6, line_id=0)])
    render_block(mixer, BLOCK)
    before = mixer.live_gains()[0]
    trigger(mixer, [_note(1.0, line_id=i) for i in range(1, 6)])
    render_block(mixer, BLOCK)
    assert mixer.live_gains()[0] == before


def test_empty_buffer_renders_zeros():
    mixer = _mixer()
    out = render_block(mixer, BLOCK)
    assert out.shape == (BLOCK,)
    assert np.all(out == 0.0)


def test_fifty_max_amplitude_notes_stay_in_range():
    mixer = _mixer()
    trigger(mixer, [_note(1.0, line_id=i, freq=220 + 10 * i) for i in range(50)])
    blocks = []
    for _ in range(60):  # well past the 0.06 s floored decay
        blocks.append(render_block(mixer, BLOCK))
    out = np.concatenate(blocks)
    assert out.min() >= -1.0 and out.max() <= 1.0
    assert mixer.live_count() == 0


def test_scaling_ablation_reproduces_clipping():
    chord = [_note(1.0, line_id=i, freq=200 + 17 * i) for i in range(10)]

    clean = _mixer()
    trigger(clean, chord)
    out = np.concatenate([render_block(clean, BLOCK) for _ in range(40)])
    assert clean.clip_samples == 0
    assert np.abs(out).max() <= 1.0

    dirty = _mixer()
    assert set_scaling_enabled(dirty, False) is True
    trigger(dirty, chord)
    out = np.concatenate([render_block(dirty, BLOCK) for _ in range(40)])
    assert dirty.clip_samples > 0
    assert np.abs(out).max() <= 1.0  # the safety limiter still bounds output


def test_scaling_toggle_is_involution():
    mixer = _mixer()
    assert set_scaling_enabled(mixer, False) is True
    assert set_scaling_enabled(mixer, True) is False
    assert mixer.scaling_enabled is True


def test_disabled_scaling_keeps_base_decay():
    mixer = _mixer()
    set_scaling_enabled(mixer, False)
    trigger(mixer, [_note(1.0, line_id=i) for i in range(20)])
    render_block(mixer, BLOCK)
    assert mixer.live_decays() == pytest.approx([0.8] * 20)
    assert mixer.live_gains() == pytest.approx([1.0] * 20)


def test_note_audible_within_two_blocks_of_trigger():
    mixer = _mixer()
    silent = render_block(mixer, BLOCK)
    assert np.all(silent == 0.0)
    trigger(mixer, [_note(1.0, onset=mixer.time())])
    nxt = render_block(mixer, BLOCK)
    assert np.abs(nxt).max() > 0.0  # audible in the very next block


def test_midblock_onset_lands_on_exact_sample():
    mixer = _mixer()
    offset = 100
    trigger(mixer, [_note(1.0, onset=offset / SR)])
    out = render_block(mixer, BLOCK)
    assert np.all(out[:offset] == 0.0)
    assert np.abs(out[offset:]).max() > 0.0


def test_queue_overflow_drops_oldest_and_reports():
    mixer = _mixer(pending_capacity=6)
    assert trigger(mixer, [_note(1.0, line_id=i) for i in range(3)]) == 3
    assert trigger(mixer, [_note(0.9, line_id=i) for i in range(3, 6)]) == 3
    assert trigger(mixer, [_note(0.8, line_id=i) for i in range(6, 9)]) == 3
    assert mixer.notes_dropped == 3  # the first chord was evicted
    assert mixer.pending_count() == 6
    render_block(mixer, BLOCK)
    assert sorted(mixer.live_amplitudes()) == pytest.approx([0.8] * 3 + [0.9] * 3)


def test_grid_sequence_accent_and_last_note_tail():
    # evenly spaced identical notes: the opening note is the only one that
    # spawns into an empty buffer, so it keeps its full gain
    mixer = _mixer()
    spacing = 0.2
    n_notes = 8
    total = spacing * n_notes + 1.2
    onsets = [k * spacing + 0.05 for k in range(n_notes)]
    next_note = 0
    blocks = []
    while mixer.time() < total:
        t1 = mixer.time() + BLOCK / SR
        while next_note < n_notes and onsets[next_note] < t1:
            trigger(mixer, [_note(1.0, line_id=next_note, onset=onsets[next_note])])
            next_note += 1
        blocks.append(render_block(mixer, BLOCK))
    out = np.concatenate(blocks)
    env = rms_envelope(out, SR)
    ts = np.array([p.t for p in env])
    rms = np.array([p.rms for p in env])

    def peak_in(t0, t1):
        m = (ts >= t0) & (ts < t1)
        return rms[m].max()

    peaks = [peak_in(t, t + spacing) for t in onsets]
    assert peaks[0] >= max(peaks[1:])

    def tail_duration(k):
        peak = peaks[k]
        t_end = onsets[k + 1] if k + 1 < n_notes else ts[-1]
        m = (ts >= onsets[k]) & (ts < t_end)
        below = ts[m][rms[m] < peak * 1e-3]
        return (below[0] if len(below) else t_end) - onsets[k]

    tails = [tail_duration(k) for k in range(n_notes)]
    assert tails[-1] > max(tails[:-1])


def test_cumulative_amplitude_matches_recomputed_sum():
    rng = np.random.default_rng(5)
    cfg = MappingConfig(decay_base=0.05, decay_min=0.01)
    mixer = ActiveNoteBuffer(SR, cfg)
    for step in range(2000):
        if rng.random() < 0.25:
            chord = [
                _note(float(rng.uniform(0, 1)), freq=float(rng.uniform(150, 1000)),
                      line_id=int(rng.integers(100)), onset=mixer.time())
                for _ in range(int(rng.integers(1, 5)))
            ]
            trigger(mixer, chord)
        else:
            render_block(mixer, 64)
        assert mixer.cumulative_amplitude == pytest.approx(sum(mixer.live_amplitudes()))
    assert mixer.notes_dropped == 0
