import { readFileSync } from 'node:fs'
import { join } from 'node:path'
import { describe, expect, it } from 'vitest'

import { buildRequest, canonicalJson } from '../src/requests.js'
import {
  initialState,
  setAudio,
  setImage,
  setMode,
  setNumericField,
  setSymptom,
  type FormState,
} from '../src/state.js'
import type { Mode } from '../src/types.js'

const FIXTURES = join(__dirname, '..', 'fixtures')

function loadFixture(mode: Mode): { path: string; body: { inputs: Record<string, unknown> } } {
  return JSON.parse(readFileSync(join(FIXTURES, `request_${mode}.json`), 'utf-8'))
}

/** The exact PCM ramp the cough fixture was recorded with. */
function fixtureRampAudio() {
  const n = 512
  const samples = new Float32Array(n)
  for (let i = 0; i < n; i++) samples[i] = (i - n / 2) / 32768
  return { samples, sampleRate: 8000, seconds: n / 8000 }
}

function fillNumericForm(mode: Mode, inputs: Record<string, unknown>): FormState {
  let state = setMode(initialState(), mode)
  for (const [name, value] of Object.entries(inputs)) {
    state = setNumericField(state, name, String(value))
  }
  return state
}

describe('request building matches recorded service fixtures', () => {
  it('symptoms: checkbox flags serialize as 0/1 under the exact names', () => {
    const fixture = loadFixture('symptoms')
    let state = setMode(initialState(), 'symptoms')
    for (const [name, flag] of Object.entries(fixture.body.inputs)) {
      state = setSymptom(state, name, flag === 1)
    }
    const request = buildRequest('symptoms', state)
    expect(request.path).toBe(fixture.path)
    expect(canonicalJson(request.body)).toBe(canonicalJson(fixture.body))
  })

  for (const mode of ['blood5', 'blood25', 'mortality7', 'mortality9'] as Mode[]) {
    it(`${mode}: numeric fields round-trip to the fixture values`, () => {
      const fixture = loadFixture(mode)
      const state = fillNumericForm(mode, fixture.body.inputs)
      const request = buildRequest(mode, state)
      expect(request.path).toBe(fixture.path)
      expect(canonicalJson(request.body)).toBe(canonicalJson(fixture.body))
    })
  }

  it('cough: recorded buffer encodes to the fixture WAV base64', () => {
    const fixture = loadFixture('cough')
    let state = setMode(initialState(), 'cough')
    state = setAudio(state, fixtureRampAudio())
    const request = buildRequest('cough', state)
    expect(request.path).toBe('/v1/predict/cough')
    expect(canonicalJson(request.body)).toBe(canonicalJson(fixture.body))
  })

  for (const mode of ['raman', 'ecg'] as Mode[]) {
    it(`${mode}: uploaded PNG bytes pass through as base64`, () => {
      const fixture = loadFixture(mode)
      const png = readFileSync(join(FIXTURES, 'png_sample.png'))
      let state = setMode(initialState(), mode)
      state = setImage(state, { bytes: new Uint8Array(png), filename: 'png_sample.png' })
      const request = buildRequest(mode, state)
      expect(request.path).toBe(fixture.path)
      expect(canonicalJson(request.body)).toBe(canonicalJson(fixture.body))
    })
  }

  it('all eight fixtures exist and carry an inputs object', () => {
    const modes: Mode[] = [
      'symptoms',
      'cough',
      'blood25',
      'blood5',
      'raman',
      'ecg',
      'mortality7',
      'mortality9',
    ]
    for (const mode of modes) {
      const fixture = loadFixture(mode)
      expect(fixture.path).toBe(`/v1/predict/${mode}`)
      expect(typeof fixture.body.inputs).toBe('object')
    }
  })
})
