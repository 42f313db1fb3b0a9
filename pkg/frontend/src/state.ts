import type {
  Directive,
  ForecastResponse,
  Stage1Attributions,
  Stage2Attributions,
} from "./types.js";

/** A scenario result remembers which form version requested it. The form
 *  version bumps on every control change, so results from an older form
 *  state can be flagged instead of silently shown as current. */
export interface ScenarioResult {
  response: ForecastResponse;
  formVersion: number;
}

export interface ViewModel {
  baseline: ForecastResponse | null;
  scenario: ScenarioResult | null;
  directives: Directive[] | null;
  stage1: Stage1Attributions | null;
  stage2: Stage2Attributions | null;
  loading: boolean;
  error: string | null;
  formVersion: number;
}

export function initialViewModel(): ViewModel {
  return {
    baseline: null,
    scenario: null,
    directives: null,
    stage1: null,
    stage2: null,
    loading: false,
    error: null,
    formVersion: 0,
  };
}

export function bumpFormVersion(vm: ViewModel): ViewModel {
  return { ...vm, formVersion: vm.formVersion + 1 };
}

export function isScenarioStale(vm: ViewModel): boolean {
  return vm.scenario !== null && vm.scenario.formVersion !== vm.formVersion;
}

export function applyScenarioResult(
  vm: ViewModel,
  response: ForecastResponse,
  formVersion: number,
): ViewModel {
  return { ...vm, scenario: { response, formVersion }, loading: false, error: null };
}

/** Errors never wipe data already on screen. */
export function applyError(vm: ViewModel, message: string): ViewModel {
  return { ...vm, loading: false, error: message };
}

export function dismissError(vm: ViewModel): ViewModel {
  return { ...vm, error: null };
}
