import { describe, expect, it } from 'vitest'

import { CaptureBuffer } from '../src/recorder.js'
import { bytesToBase64, encodeWav16 } from '../src/wav.js'

function ascii(bytes: Uint8Array, start: number, length: number): string {
  return String.fromCharCode(...bytes.subarray(start, start + length))
}

describe('encodeWav16', () => {
  it('writes a canonical 44-byte PCM mono header', () => {
    const wav = encodeWav16(new Float32Array(100), 8000)
    const view = new DataView(wav.buffer)
    expect(ascii(wav, 0, 4)).toBe('RIFF')
    expect(ascii(wav, 8, 4)).toBe('WAVE')
    expect(ascii(wav, 12, 4)).toBe('fmt ')
    expect(view.getUint32(4, true)).toBe(36 + 200)
    expect(view.getUint16(20, true)).toBe(1) // PCM
    expect(view.getUint16(22, true)).toBe(1) // mono
    expect(view.getUint32(24, true)).toBe(8000)
    expect(view.getUint32(28, true)).toBe(16000) // byte rate
    expect(view.getUint16(32, true)).toBe(2) // block align
    expect(view.getUint16(34, true)).toBe(16)
    expect(ascii(wav, 36, 4)).toBe('data')
    expect(view.getUint32(40, true)).toBe(200)
    expect(wav.length).toBe(244)
  })

  it('scales and clamps samples to int16', () => {
    const wav = encodeWav16(new Float32Array([0, 0.5, -1, 2, -2]), 8000)
    const view = new DataView(wav.buffer)
    expect(view.getInt16(44, true)).toBe(0)
    expect(view.getInt16(46, true)).toBe(16384)
    expect(view.getInt16(48, true)).toBe(-32768)
    expect(view.getInt16(50, true)).toBe(32767) // clamped
    expect(view.getInt16(52, true)).toBe(-32768)
  })

  it('base64 round-trips through node Buffer', () => {
    const wav = encodeWav16(new Float32Array([0.25, -0.25]), 16000)
    const b64 = bytesToBase64(wav)
    expect(Buffer.from(b64, 'base64')).toEqual(Buffer.from(wav))
  })
})

describe('CaptureBuffer', () => {
  it('accumulates chunks and reports elapsed seconds', () => {
    const buffer = new CaptureBuffer(8000)
    buffer.push(new Float32Array(4000))
    buffer.push(new Float32Array(2000))
    expect(buffer.seconds).toBeCloseTo(0.75, 9)
    const result = buffer.finish()
    expect(result.samples.length).toBe(6000)
    expect(result.sampleRate).toBe(8000)
  })

  it('copies chunk contents in order', () => {
    const buffer = new CaptureBuffer(100)
    const a = new Float32Array([1, 2])
    const b = new Float32Array([3])
    buffer.push(a)
    a[0] = 99 // later mutation must not leak into the capture
    buffer.push(b)
    expect(Array.from(buffer.finish().samples)).toEqual([1, 2, 3])
  })

  it('rejects a non-positive sample rate', () => {
    expect(() => new CaptureBuffer(0)).toThrow()
  })
})
