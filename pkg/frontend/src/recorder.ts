/** Microphone capture to a mono Float32 buffer.
 *
 * Capture runs at the browser-native sample rate through a script
 * processor tap; the buffer accumulation below is plain data handling,
 * so tests can drive it without a browser. Stop is only meaningful
 * after start; re-recording replaces the previous buffer.
 */

export interface CaptureResult {
  samples: Float32Array
  sampleRate: number
  seconds: number
}

/** Accumulates PCM chunks and tracks elapsed capture time. */
export class CaptureBuffer {
  private chunks: Float32Array[] = []
  private total = 0
  readonly sampleRate: number

  constructor(sampleRate: number) {
    if (sampleRate <= 0) throw new Error('sample rate must be positive')
    this.sampleRate = sampleRate
  }

  push(chunk: Float32Array): void {
    this.chunks.push(chunk.slice())
    this.total += chunk.length
  }

  get seconds(): number {
    return this.total / this.sampleRate
  }

  finish(): CaptureResult {
    const samples = new Float32Array(this.total)
    let offset = 0
    for (const chunk of this.chunks) {
      samples.set(chunk, offset)
      offset += chunk.length
    }
    return { samples, sampleRate: this.sampleRate, seconds: this.seconds }
  }
}

export type RecorderState = 'idle' | 'recording'

export interface RecorderHooks {
  /** Called roughly per captured chunk with the elapsed seconds. */
  onElapsed?: (seconds: number) => void
}

/** Browser microphone recorder; one active capture at a time. */
export class MicRecorder {
  private context: AudioContext | null = null
  private stream: MediaStream | null = null
  private processor: ScriptProcessorNode | null = null
  private buffer: CaptureBuffer | null = null
  state: RecorderState = 'idle'

  constructor(private hooks: RecorderHooks = {}) {}

  async start(): Promise<void> {
    if (this.state === 'recording') throw new Error('already recording')
    const stream = await navigator.mediaDevices.getUserMedia({ audio: true })
    const context = new AudioContext()
    const source = context.createMediaStreamSource(stream)
    const processor = context.createScriptProcessor(4096, 1, 1)
    const buffer = new CaptureBuffer(context.sampleRate)
    processor.onaudioprocess = (event) => {
      buffer.push(event.inputBuffer.getChannelData(0))
      this.hooks.onElapsed?.(buffer.seconds)
    }
    source.connect(processor)
    processor.connect(context.destination)
    this.context = context
    this.stream = stream
    this.processor = processor
    this.buffer = buffer
    this.state = 'recording'
  }

  async stop(): Promise<CaptureResult> {
    if (this.state !== 'recording' || !this.buffer) {
      throw new Error('not recording')
    }
    this.processor?.disconnect()
    this.stream?.getTracks().forEach((track) => track.stop())
    await this.context?.close()
    const result = this.buffer.finish()
    this.context = null
    this.stream = null
    this.processor = null
    this.buffer = null
    this.state = 'idle'
    return result
  }
}
