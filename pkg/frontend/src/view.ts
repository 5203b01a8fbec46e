/** Pure HTML rendering from FormState (no DOM access here). */

import { isMortality, NUMERIC_FIELDS, RISK_BANNER_THRESHOLD, SYMPTOM_FLAGS } from './schema.js'
import { canSubmit, fieldError, type FormState } from './state.js'
import { ALL_MODES, type Mode } from './types.js'

const MODE_TITLES: Record<Mode, string> = {
  symptoms: 'Symptoms',
  cough: 'Cough audio',
  blood25: 'Blood test (25 parameters)',
  blood5: 'Blood test (5 parameters)',
  raman: 'Serum Raman image',
  ecg: 'ECG report image',
  mortality7: 'Mortality risk (7 parameters)',
  mortality9: 'Mortality risk (9 parameters)',
}

function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
}

export function renderTabs(state: FormState): string {
  return ALL_MODES.map((mode) => {
    const active = mode === state.activeMode ? ' class="active"' : ''
    return `<button data-mode="${mode}"${active}>${esc(MODE_TITLES[mode])}</button>`
  }).join('')
}

export function renderForm(state: FormState): string {
  const mode = state.activeMode
  if (mode === 'symptoms') {
    const boxes = SYMPTOM_FLAGS.map((name) => {
      const checked = state.symptoms[name] ? ' checked' : ''
      return (
        `<label><input type="checkbox" data-symptom="${esc(name)}"${checked}>` +
        ` ${esc(name)}</label>`
      )
    }).join('')
    return `<fieldset>${boxes}</fieldset>`
  }
  if (mode === 'cough') {
    const status = state.audio
      ? `recorded ${state.audio.seconds.toFixed(1)} s`
      : 'no recording yet — cough 5 times loudly'
    return (
      `<div class="recorder">` +
      `<button data-action="record-start">Start recording</button>` +
      `<button data-action="record-stop" disabled>Stop</button>` +
      `<span data-role="elapsed">${esc(status)}</span></div>`
    )
  }
  if (mode === 'raman' || mode === 'ecg') {
    const status = state.image ? esc(state.image.filename) : 'no file selected'
    return (
      `<div class="upload"><input type="file" accept="image/png" data-action="pick-image">` +
      `<span data-role="filename">${status}</span></div>`
    )
  }
  const fields = NUMERIC_FIELDS[mode] ?? []
  const rows = fields.map((field) => {
    const text = state.numericText[mode]?.[field.name] ?? ''
    const error = text === '' ? '' : fieldError(state, field.name) ?? ''
    const errorHtml = error ? `<span class="field-error">${esc(error)}</span>` : ''
    return (
      `<label>${esc(field.name)} (${esc(field.unit)})` +
      `<input type="text" inputmode="decimal" data-field="${esc(field.name)}"` +
      ` value="${esc(text)}">${errorHtml}</label>`
    )
  })
  return `<fieldset>${rows.join('')}</fieldset>`
}

export function renderSubmit(state: FormState): string {
  const disabled = canSubmit(state) ? '' : ' disabled'
  const label = state.pending ? 'Predicting…' : 'Predict'
  return `<button data-action="submit"${disabled}>${label}</button>`
}

export function renderDialog(state: FormState): string {
  const dialog = state.dialog
  if (!dialog) return ''
  if (dialog.kind === 'error') {
    return (
      `<div class="dialog error" role="alertdialog">` +
      `<p>${esc(dialog.message)}</p>` +
      `<button data-action="dismiss">Dismiss</button></div>`
    )
  }
  const r = dialog.result
  const pct = (100 * r.probability_positive).toFixed(1)
  const banner =
    isMortality(r.mode) && r.probability_positive >= RISK_BANNER_THRESHOLD
      ? `<p class="banner">Seek critical care guidance</p>`
      : ''
  return (
    `<div class="dialog result" role="dialog">${banner}` +
    `<h2>${esc(r.label)}</h2>` +
    `<p>probability ${pct}% &middot; ${r.latency_ms.toFixed(1)} ms &middot; ` +
    `model ${esc(r.model_version)}</p>` +
    `<button data-action="dismiss">Close</button></div>`
  )
}

export function renderApp(state: FormState): string {
  return (
    `<nav>${renderTabs(state)}</nav>` +
    `<main><h1>${esc(MODE_TITLES[state.activeMode])}</h1>` +
    `${renderForm(state)}${renderSubmit(state)}${renderDialog(state)}</main>`
  )
}
