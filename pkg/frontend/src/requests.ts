/** Build service requests from a filled form.
 *
 * The JSON produced here is the UI's half of the wire contract; the
 * tests compare its canonical form against fixtures recorded from a
 * live service.
 */

import { numericValues, type FormState } from './state.js'
import { SYMPTOM_FLAGS } from './schema.js'
import type { Mode, PredictInputs, PredictRequest } from './types.js'
import { bytesToBase64, encodeWav16 } from './wav.js'

export function buildInputs(mode: Mode, state: FormState): PredictInputs {
  if (mode === 'symptoms') {
    const inputs: PredictInputs = {}
    for (const name of SYMPTOM_FLAGS) inputs[name] = state.symptoms[name] ? 1 : 0
    return inputs
  }
  if (mode === 'cough') {
    if (!state.audio) throw new Error('no recorded audio')
    const wav = encodeWav16(state.audio.samples, state.audio.sampleRate)
    return { wav_base64: bytesToBase64(wav) }
  }
  if (mode === 'raman' || mode === 'ecg') {
    if (!state.image) throw new Error('no selected image')
    return { png_base64: bytesToBase64(state.image.bytes) }
  }
  const values = numericValues(state, mode)
  if (!values) throw new Error('numeric fields incomplete')
  return values
}

export function buildRequest(mode: Mode, state: FormState): PredictRequest {
  return { path: `/v1/predict/${mode}`, body: { inputs: buildInputs(mode, state) } }
}

/** Stable key order + compact separators, for byte comparisons. */
export function canonicalJson(value: unknown): string {
  return JSON.stringify(sortKeys(value))
}

function sortKeys(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(sortKeys)
  if (value !== null && typeof value === 'object') {
    const src = value as Record<string, unknown>
    const out: Record<string, unknown> = {}
    for (const key of Object.keys(src).sort()) out[key] = sortKeys(src[key])
    return out
  }
  return value
}
