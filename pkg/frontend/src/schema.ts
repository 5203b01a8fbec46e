/** Per-mode input schemas: field lists and display units.
 *
 * Field names must match the service schemas exactly; units are
 * display-only hints for the numeric inputs.
 */

import type { Mode } from './types.js'

export interface NumericField {
  name: string
  unit: string
}

export const SYMPTOM_FLAGS = [
  'Headache',
  'Fever',
  'Cough',
  'Sore throat',
  'Shortness of breath',
] as const

export const BLOOD5_FIELDS: NumericField[] = [
  { name: 'Age', unit: 'years' },
  { name: 'TWBC', unit: '10^9/L' },
  { name: 'Eosinophils', unit: '10^9/L' },
  { name: 'Monocytes', unit: '10^9/L' },
  { name: 'Platelets', unit: '10^9/L' },
]

export const BLOOD25_FIELDS: NumericField[] = [
  { name: 'Age', unit: 'years' },
  { name: 'Hemoglobin', unit: 'g/dL' },
  { name: 'RBC', unit: '10^12/L' },
  { name: 'HCT', unit: '%' },
  { name: 'MCV', unit: 'fL' },
  { name: 'MCH', unit: 'pg' },
  { name: 'MCHC', unit: 'g/dL' },
  { name: 'RDW', unit: '%' },
  { name: 'TWBC', unit: '10^9/L' },
  { name: 'Neutrophils', unit: '10^9/L' },
  { name: 'Eosinophils', unit: '10^9/L' },
  { name: 'Basophils', unit: '10^9/L' },
  { name: 'Lymphocytes', unit: '10^9/L' },
  { name: 'Monocytes', unit: '10^9/L' },
  { name: 'Platelets', unit: '10^9/L' },
  { name: 'MPV', unit: 'fL' },
  { name: 'Albumin', unit: 'g/dL' },
  { name: 'Sodium', unit: 'mmol/L' },
  { name: 'Potassium', unit: 'mmol/L' },
  { name: 'Alanine transaminase', unit: 'U/L' },
  { name: 'Aspartate transaminase', unit: 'U/L' },
  { name: 'Hs-CRP', unit: 'mg/L' },
  { name: 'Creatinine', unit: 'mg/dL' },
  { name: 'Urea', unit: 'mg/dL' },
  { name: 'PT', unit: 's' },
]

export const MORTALITY7_FIELDS: NumericField[] = [
  { name: 'Neutrophils', unit: '10^9/L' },
  { name: 'Lymphocytes', unit: '10^9/L' },
  { name: 'Monocytes', unit: '10^9/L' },
  { name: 'Platelets', unit: '10^9/L' },
  { name: 'Albumin', unit: 'g/dL' },
  { name: 'Hs-CRP', unit: 'mg/L' },
  { name: 'PT', unit: 's' },
]

export const MORTALITY9_FIELDS: NumericField[] = [
  { name: 'Age', unit: 'years' },
  { name: 'MCHC', unit: 'g/dL' },
  { name: 'RDW', unit: '%' },
  { name: 'TWBC', unit: '10^9/L' },
  { name: 'BE', unit: 'mmol/L' },
  { name: 'PT', unit: 's' },
  { name: 'PTT', unit: 's' },
  { name: 'RR', unit: 'breaths/min' },
  { name: 'SpO2', unit: '%' },
]

export const NUMERIC_FIELDS: Partial<Record<Mode, NumericField[]>> = {
  blood5: BLOOD5_FIELDS,
  blood25: BLOOD25_FIELDS,
  mortality7: MORTALITY7_FIELDS,
  mortality9: MORTALITY9_FIELDS,
}

export function isMortality(mode: Mode): boolean {
  return mode === 'mortality7' || mode === 'mortality9'
}

/** Risk fraction above which the critical-care banner is shown. */
export const RISK_BANNER_THRESHOLD = 0.5
