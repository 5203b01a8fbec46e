/** 16-bit PCM mono WAV encoding and base64 helpers.
 *
 * Audio is captured at the browser-native rate and encoded client-side
 * so the service always receives one canonical container.
 */

export function encodeWav16(samples: Float32Array, sampleRate: number): Uint8Array {
  const n = samples.length
  const bytes = new Uint8Array(44 + n * 2)
  const view = new DataView(bytes.buffer)

  const writeTag = (offset: number, tag: string) => {
    for (let i = 0; i < tag.length; i++) bytes[offset + i] = tag.charCodeAt(i)
  }
  writeTag(0, 'RIFF')
  view.setUint32(4, 36 + n * 2, true)
  writeTag(8, 'WAVE')
  writeTag(12, 'fmt ')
  view.setUint32(16, 16, true) // fmt chunk size
  view.setUint16(20, 1, true) // PCM
  view.setUint16(22, 1, true) // mono
  view.setUint32(24, sampleRate, true)
  view.setUint32(28, sampleRate * 2, true) // byte rate
  view.setUint16(32, 2, true) // block align
  view.setUint16(34, 16, true) // bits per sample
  writeTag(36, 'data')
  view.setUint32(40, n * 2, true)

  for (let i = 0; i < n; i++) {
    const clamped = Math.max(-1, Math.min(1, samples[i]))
    let pcm = Math.round(clamped * 32768)
    if (pcm > 32767) pcm = 32767
    if (pcm < -32768) pcm = -32768
    view.setInt16(44 + i * 2, pcm, true)
  }
  return bytes
}

export function bytesToBase64(bytes: Uint8Array): string {
  // btoa handles binary strings in browsers; Buffer covers node tests
  if (typeof btoa === 'function') {
    let binary = ''
    const chunk = 0x8000
    for (let i = 0; i < bytes.length; i += chunk) {
      binary += String.fromCharCode(...bytes.subarray(i, i + chunk))
    }
    return btoa(binary)
  }
  return Buffer.from(bytes).toString('base64')
}
