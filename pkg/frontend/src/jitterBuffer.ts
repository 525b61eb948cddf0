// Jitter buffer between the network and the audio callback. Frames carry
// strictly increasing sequence numbers; a missing number means the server
// dropped that block for us, so we play one block of silence in its place.
// The consumer never waits: an empty buffer after priming is an underrun
// and also yields silence.

export class JitterBuffer {
  private frames = new Map<number, Float32Array>();
  private nextSeq: number | null = null;
  private primed = false;

  underruns = 0;
  gapsFilled = 0;

  constructor(
    readonly blockFrames: number,
    readonly targetBlocks: number = 4,
  ) {
    if (targetBlocks < 1) throw new Error("targetBlocks must be >= 1");
  }

  /** Added latency budget in seconds for a given sample rate. */
  latencySeconds(sampleRate: number): number {
    return (this.targetBlocks * this.blockFrames) / sampleRate;
  }

  push(seq: number, samples: Float32Array): void {
    if (samples.length !== this.blockFrames) {
      throw new Error(`expected ${this.blockFrames} frames, got ${samples.length}`);
    }
    if (this.nextSeq !== null && seq < this.nextSeq) return; // too late to play
    this.frames.set(seq, samples);
    if (this.nextSeq === null) this.nextSeq = seq;
    if (!this.primed && this.buffered() >= this.targetBlocks) this.primed = true;
  }

  buffered(): number {
    return this.frames.size;
  }

  isPrimed(): boolean {
    return this.primed;
  }

  /** Next block for the audio callback; silence until primed. */
  pull(): Float32Array {
    if (!this.primed || this.nextSeq === null) {
      return new Float32Array(this.blockFrames);
    }
    const frame = this.frames.get(this.nextSeq);
    if (frame !== undefined) {
      this.frames.delete(this.nextSeq);
      this.nextSeq += 1;
      return frame;
    }
    if (this.frames.size > 0) {
      // the sequence number was skipped: server-side drop, fill the hole
      this.gapsFilled += 1;
      this.nextSeq += 1;
      return new Float32Array(this.blockFrames);
    }
    this.underruns += 1;
    return new Float32Array(this.blockFrames);
  }
}
