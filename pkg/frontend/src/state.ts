/** DOM-free form state machine.
 *
 * The view renders from this state; reducers return new states and
 * never mutate. Submit is enabled only when the active mode's inputs
 * are complete and valid, and a failed submit must leave every field
 * exactly as the user filled it.
 */

import { NUMERIC_FIELDS, SYMPTOM_FLAGS } from './schema.js'
import type { Mode, PredictionResult } from './types.js'

export interface RecordedAudio {
  samples: Float32Array
  sampleRate: number
  seconds: number
}

export interface SelectedImage {
  bytes: Uint8Array
  filename: string
}

export type Dialog =
  | { kind: 'result'; result: PredictionResult }
  | { kind: 'error'; message: string }
  | null

export interface FormState {
  activeMode: Mode
  symptoms: Record<string, boolean>
  /** raw text per numeric field, keyed by mode then field name */
  numericText: Record<string, Record<string, string>>
  audio: RecordedAudio | null
  image: SelectedImage | null
  pending: boolean
  dialog: Dialog
  lastResult: PredictionResult | null
}

export function initialState(mode: Mode = 'symptoms'): FormState {
  const symptoms: Record<string, boolean> = {}
  for (const name of SYMPTOM_FLAGS) symptoms[name] = false
  return {
    activeMode: mode,
    symptoms,
    numericText: {},
    audio: null,
    image: null,
    pending: false,
    dialog: null,
    lastResult: null,
  }
}

export function setMode(state: FormState, mode: Mode): FormState {
  return { ...state, activeMode: mode, dialog: null }
}

export function setSymptom(state: FormState, name: string, checked: boolean): FormState {
  if (!(name in state.symptoms)) return state
  return { ...state, symptoms: { ...state.symptoms, [name]: checked } }
}

export function setNumericField(state: FormState, name: string, text: string): FormState {
  const mode = state.activeMode
  const forMode = { ...(state.numericText[mode] ?? {}), [name]: text }
  return { ...state, numericText: { ...state.numericText, [mode]: forMode } }
}

/** Replaces any previous recording. */
export function setAudio(state: FormState, audio: RecordedAudio): FormState {
  return { ...state, audio }
}

export function setImage(state: FormState, image: SelectedImage): FormState {
  return { ...state, image }
}

export function fieldError(state: FormState, name: string): string | null {
  const text = state.numericText[state.activeMode]?.[name] ?? ''
  if (text.trim() === '') return 'required'
  return Number.isFinite(Number(text)) ? null : 'not a number'
}

export function numericValues(state: FormState, mode: Mode): Record<string, number> | null {
  const fields = NUMERIC_FIELDS[mode]
  if (!fields) return null
  const out: Record<string, number> = {}
  for (const field of fields) {
    const text = state.numericText[mode]?.[field.name] ?? ''
    const value = Number(text)
    if (text.trim() === '' || !Number.isFinite(value)) return null
    out[field.name] = value
  }
  return out
}

export function canSubmit(state: FormState): boolean {
  if (state.pending) return false
  const mode = state.activeMode
  if (mode === 'symptoms') return true // all-unchecked is a valid all-zero vector
  if (mode === 'cough') return state.audio !== null
  if (mode === 'raman' || mode === 'ecg') return state.image !== null
  return numericValues(state, mode) !== null
}

export function submitStart(state: FormState): FormState {
  return { ...state, pending: true, dialog: null }
}

export function submitSuccess(state: FormState, result: PredictionResult): FormState {
  return { ...state, pending: false, dialog: { kind: 'result', result }, lastResult: result }
}

/** Failure keeps the form intact: only pending/dialog change. */
export function submitFailure(state: FormState, message: string): FormState {
  return { ...state, pending: false, dialog: { kind: 'error', message } }
}

export function dismissDialog(state: FormState): FormState {
  return { ...state, dialog: null }
}
