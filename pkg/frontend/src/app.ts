/** DOM wiring: renders FormState into #app and routes events.
 *
 * Service base URL resolution: ?service=... query parameter, then the
 * MULTIDX_SERVICE_URL global (set by the hosting page), then same-origin.
 */

import { ServiceClient } from './client.js'
import { buildRequest } from './requests.js'
import { MicRecorder } from './recorder.js'
import {
  canSubmit,
  dismissDialog,
  initialState,
  setAudio,
  setImage,
  setMode,
  setNumericField,
  setSymptom,
  submitFailure,
  submitStart,
  submitSuccess,
  type FormState,
} from './state.js'
import { renderApp } from './view.js'
import type { Mode, PredictionResult } from './types.js'

declare global {
  interface Window {
    MULTIDX_SERVICE_URL?: string
  }
}

function serviceBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('service')
  return fromQuery ?? window.MULTIDX_SERVICE_URL ?? ''
}

export function mountApp(root: HTMLElement): void {
  let state: FormState = initialState()
  const client = new ServiceClient({ baseUrl: serviceBaseUrl() })
  const recorder = new MicRecorder({
    onElapsed: (seconds) => {
      const el = root.querySelector('[data-role="elapsed"]')
      if (el) el.textContent = `recording… ${seconds.toFixed(1)} s`
    },
  })

  const update = (next: FormState) => {
    state = next
    render()
  }

  const render = () => {
    root.innerHTML = renderApp(state)
    root.querySelectorAll<HTMLButtonElement>('nav button').forEach((button) => {
      button.onclick = () => update(setMode(state, button.dataset.mode as Mode))
    })
    root.querySelectorAll<HTMLInputElement>('[data-symptom]').forEach((box) => {
      box.onchange = () => update(setSymptom(state, box.dataset.symptom!, box.checked))
    })
    root.querySelectorAll<HTMLInputElement>('[data-field]').forEach((input) => {
      input.onchange = () => update(setNumericField(state, input.dataset.field!, input.value))
    })
    const startBtn = root.querySelector<HTMLButtonElement>('[data-action="record-start"]')
    const stopBtn = root.querySelector<HTMLButtonElement>('[data-action="record-stop"]')
    if (startBtn && stopBtn) {
      stopBtn.disabled = recorder.state !== 'recording'
      startBtn.onclick = async () => {
        try {
          await recorder.start()
          startBtn.disabled = true
          stopBtn.disabled = false
        } catch (err) {
          update(submitFailure(state, `microphone unavailable: ${String(err)}`))
        }
      }
      stopBtn.onclick = async () => {
        const capture = await recorder.stop()
        update(setAudio(state, capture))
      }
    }
    const picker = root.querySelector<HTMLInputElement>('[data-action="pick-image"]')
    if (picker) {
      picker.onchange = async () => {
        const file = picker.files?.[0]
        if (!file) return
        const bytes = new Uint8Array(await file.arrayBuffer())
        update(setImage(state, { bytes, filename: file.name }))
      }
    }
    const submitBtn = root.querySelector<HTMLButtonElement>('[data-action="submit"]')
    if (submitBtn) {
      submitBtn.onclick = async () => {
        if (!canSubmit(state)) return
        const mode = state.activeMode
        update(submitStart(state))
        const envelope = await client.predict(buildRequest(mode, state))
        if (envelope.ok && envelope.result) {
          update(submitSuccess(state, envelope.result as PredictionResult))
        } else {
          update(submitFailure(state, envelope.error ?? 'unknown service error'))
        }
      }
    }
    root.querySelectorAll<HTMLButtonElement>('[data-action="dismiss"]').forEach((btn) => {
      btn.onclick = () => update(dismissDialog(state))
    })
  }

  render()
}

const rootEl = typeof document !== 'undefined' ? document.getElementById('app') : null
if (rootEl) mountApp(rootEl)
