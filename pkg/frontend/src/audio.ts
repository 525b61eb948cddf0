// Streamed PCM playback through Web Audio: binary frames land in the jitter
// buffer, the audio callback pulls fixed-size blocks and never waits.

import { JitterBuffer } from "./jitterBuffer.js";
import { AudioFrame } from "./protocol.js";

export class StreamPlayer {
  readonly buffer: JitterBuffer;
  private ctx: AudioContext | null = null;
  private node: ScriptProcessorNode | null = null;
  private carry: Float32Array = new Float32Array(0);

  constructor(
    readonly sampleRate: number,
    readonly blockFrames: number,
    targetBlocks = 4,
  ) {
    this.buffer = new JitterBuffer(blockFrames, targetBlocks);
  }

  get underruns(): number {
    return this.buffer.underruns;
  }

  get gapsFilled(): number {
    return this.buffer.gapsFilled;
  }

  onFrame = (frame: AudioFrame): void => {
    this.buffer.push(frame.seq, frame.samples);
  };

  /** Start the output; must be called from a user gesture in browsers. */
  async start(): Promise<void> {
    if (this.ctx) return;
    this.ctx = new AudioContext({ sampleRate: this.sampleRate });
    await this.ctx.resume();
    // callback quantum independent of the network block size
    const quantum = 1024;
    this.node = this.ctx.createScriptProcessor(quantum, 0, 1);
    this.node.onaudioprocess = (ev) => {
      const out = ev.outputBuffer.getChannelData(0);
      let filled = 0;
      const take = Math.min(this.carry.length, out.length);
      out.set(this.carry.subarray(0, take));
      this.carry = this.carry.subarray(take);
      filled += take;
      while (filled < out.length) {
        const block = this.buffer.pull();
        const room = out.length - filled;
        if (block.length <= room) {
          out.set(block, filled);
          filled += block.length;
        } else {
          out.set(block.subarray(0, room), filled);
          this.carry = block.subarray(room);
          filled = out.length;
        }
      }
    };
    this.node.connect(this.ctx.destination);
  }

  async stop(): Promise<void> {
    this.node?.disconnect();
    this.node = null;
    await this.ctx?.close();
    this.ctx = null;
  }
}
