/** Wire types mirroring the service's documented JSON schemas. */

export type Mode =
  | 'symptoms'
  | 'cough'
  | 'blood25'
  | 'blood5'
  | 'raman'
  | 'ecg'
  | 'mortality7'
  | 'mortality9'

export const ALL_MODES: Mode[] = [
  'symptoms',
  'cough',
  'blood25',
  'blood5',
  'raman',
  'ecg',
  'mortality7',
  'mortality9',
]

/** Keyed numeric map for tabular modes; single-key payloads otherwise. */
export type PredictInputs = Record<string, number | string>

export interface PredictRequest {
  path: string
  body: { inputs: PredictInputs }
}

export interface PredictionResult {
  mode: Mode
  probability_positive: number
  label: string
  model_version: string
  latency_ms: number
}

export interface Envelope<T> {
  ok: boolean
  result: T | null
  error: string | null
}

export type PredictResponse = Envelope<PredictionResult>
