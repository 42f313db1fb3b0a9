import type { ScenarioRequestBody } from "./types.js";

/** What the operator has dialed in; the only client-side state that
 *  feeds requests. */
export interface ScenarioFormState {
  delta_t2m: number;
  aod_multiplier: number;
  horizon: number;
}

export const FORM_DEFAULTS: ScenarioFormState = {
  delta_t2m: 0,
  aod_multiplier: 1.0,
  horizon: 30,
};

export const DELTA_T2M_RANGE = { min: -2, max: 5, step: 0.1 };
export const AOD_MULTIPLIER_RANGE = { min: 0.5, max: 2.0, step: 0.05 };
export const HORIZON_CHOICES = [7, 14, 30, 60];

/** Stress preset exposed as a one-click button. */
export const STRESS_PRESET = { delta_t2m: 1.5, aod_multiplier: 1.2 };

export function applyStressPreset(form: ScenarioFormState): ScenarioFormState {
  return { ...form, ...STRESS_PRESET };
}

/** Form to request body, field for field. Nothing is scaled or rounded
 *  here; the sliders already enforce range and step. */
export function toScenarioRequest(form: ScenarioFormState): ScenarioRequestBody {
  return {
    delta_t2m: form.delta_t2m,
    aod_multiplier: form.aod_multiplier,
    horizon: form.horizon,
  };
}

export function isIdentity(form: ScenarioFormState): boolean {
  return form.delta_t2m === 0 && form.aod_multiplier === 1.0;
}

export function validateForm(form: ScenarioFormState): string | null {
  if (form.delta_t2m < DELTA_T2M_RANGE.min || form.delta_t2m > DELTA_T2M_RANGE.max) {
    return `temperature delta out of range [${DELTA_T2M_RANGE.min}, ${DELTA_T2M_RANGE.max}]`;
  }
  if (form.aod_multiplier < AOD_MULTIPLIER_RANGE.min ||
      form.aod_multiplier > AOD_MULTIPLIER_RANGE.max) {
    return `AOD multiplier out of range [${AOD_MULTIPLIER_RANGE.min}, ${AOD_MULTIPLIER_RANGE.max}]`;
  }
  if (!Number.isInteger(form.horizon) || form.horizon < 1) {
    return "horizon must be a positive whole number of days";
  }
  return null;
}
