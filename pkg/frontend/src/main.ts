import { ApiClient, ApiError, isAbort } from "./api.js";
import {
  renderAttributionPlaceholder,
  renderMeanBars,
  renderWaterfall,
} from "./attributions.js";
import { overlayChart } from "./charts.js";
import { renderDirectiveCards } from "./directives.js";
import {
  AOD_MULTIPLIER_RANGE,
  DELTA_T2M_RANGE,
  FORM_DEFAULTS,
  HORIZON_CHOICES,
  STRESS_PRESET,
  toScenarioRequest,
  validateForm,
  type ScenarioFormState,
} from "./form.js";
import {
  applyError,
  applyScenarioResult,
  bumpFormVersion,
  dismissError,
  initialViewModel,
  isScenarioStale,
  type ViewModel,
} from "./state.js";
import { deltaSummary, renderBanner, renderSummary } from "./summary.js";

const api = new ApiClient("");
let vm: ViewModel = initialViewModel();
let waterfallInstance = 0;

const $ = (id: string): HTMLElement => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
};

function readForm(): ScenarioFormState {
  return {
    delta_t2m: Number(($("delta-t2m") as HTMLInputElement).value),
    aod_multiplier: Number(($("aod-multiplier") as HTMLInputElement).value),
    horizon: Number(($("horizon") as HTMLSelectElement).value),
  };
}

function writeForm(form: ScenarioFormState): void {
  ($("delta-t2m") as HTMLInputElement).value = String(form.delta_t2m);
  ($("aod-multiplier") as HTMLInputElement).value = String(form.aod_multiplier);
  ($("horizon") as HTMLSelectElement).value = String(form.horizon);
  renderFormLabels();
}

function renderFormLabels(): void {
  const form = readForm();
  $("delta-t2m-value").textContent = `${form.delta_t2m >= 0 ? "+" : ""}${form.delta_t2m.toFixed(1)} degC`;
  $("aod-multiplier-value").textContent = `x${form.aod_multiplier.toFixed(2)}`;
}

function render(): void {
  $("banner").innerHTML = renderBanner(vm.error);
  $("banner").querySelector(".dismiss")?.addEventListener("click", () => {
    vm = dismissError(vm);
    render();
  });

  const scenario = vm.scenario?.response ?? null;
  if (vm.baseline) {
    $("aod-chart").innerHTML = overlayChart({
      title: "AOD forecast",
      baseline: vm.baseline.aod,
      scenario: scenario?.aod ?? null,
    });
    $("loss-chart").innerHTML = overlayChart({
      title: "Efficiency loss (%)",
      baseline: vm.baseline.efficiency_loss_pct,
      scenario: scenario?.efficiency_loss_pct ?? null,
    });
  }

  if (vm.baseline && scenario && vm.directives) {
    $("summary").innerHTML = renderSummary(
      deltaSummary(vm.baseline, scenario, vm.directives),
      isScenarioStale(vm),
    );
  } else {
    $("summary").innerHTML = "";
  }

  $("directives").innerHTML = renderDirectiveCards(vm.directives ?? []);

  const stage2 = vm.stage2?.report;
  if (stage2) {
    $("attribution-bars").innerHTML = renderMeanBars(stage2, "Efficiency loss drivers");
    $("waterfall").innerHTML = renderWaterfall(stage2, waterfallInstance);
    const picker = $("waterfall-picker") as HTMLSelectElement;
    if (picker.options.length !== stage2.per_instance_phi.length) {
      picker.innerHTML = stage2.per_instance_phi
        .map((_, i) => `<option value="${i}">day ${i + 1}</option>`)
        .join("");
      picker.value = String(waterfallInstance);
    }
  } else {
    $("attribution-bars").innerHTML = renderAttributionPlaceholder();
    $("waterfall").innerHTML = "";
  }

  const stage1 = vm.stage1;
  $("stage1-bars").innerHTML = stage1
    ? renderMeanBars(stage1.static, "AOD drivers: meteorology") +
      renderMeanBars(stage1.temporal, "AOD drivers: recent history")
    : renderAttributionPlaceholder();
}

async function loadBaseline(): Promise<void> {
  const horizon = readForm().horizon;
  try {
    const [forecast, directives] = await Promise.all([
      api.getForecast(horizon),
      api.getDirectives(horizon),
    ]);
    vm = { ...vm, baseline: forecast, directives: directives.directives };
  } catch (err) {
    vm = applyError(vm, describe(err));
  }
  render();
}

async function loadAttributions(): Promise<void> {
  try {
    const [s1, s2] = await Promise.all([
      api.getStage1Attributions(),
      api.getStage2Attributions(),
    ]);
    vm = { ...vm, stage1: s1, stage2: s2 };
  } catch (err) {
    // attribution endpoints may be warming up; charts show placeholders
    vm = { ...vm, stage1: null, stage2: null };
  }
  render();
}

async function submitScenario(): Promise<void> {
  const form = readForm();
  const problem = validateForm(form);
  if (problem) {
    vm = applyError(vm, problem);
    render();
    return;
  }
  const requestedVersion = vm.formVersion;
  vm = { ...vm, loading: true };
  render();
  try {
    const response = await api.postScenario(toScenarioRequest(form));
    vm = applyScenarioResult(vm, response, requestedVersion);
    await loadBaseline();
  } catch (err) {
    if (!isAbort(err)) vm = applyError(vm, describe(err));
  }
  render();
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return `service rejected the request (${err.status}): ${JSON.stringify(err.detail)}`;
  }
  return err instanceof Error ? err.message : String(err);
}

function init(): void {
  const delta = $("delta-t2m") as HTMLInputElement;
  delta.min = String(DELTA_T2M_RANGE.min);
  delta.max = String(DELTA_T2M_RANGE.max);
  delta.step = String(DELTA_T2M_RANGE.step);

  const mult = $("aod-multiplier") as HTMLInputElement;
  mult.min = String(AOD_MULTIPLIER_RANGE.min);
  mult.max = String(AOD_MULTIPLIER_RANGE.max);
  mult.step = String(AOD_MULTIPLIER_RANGE.step);

  ($("horizon") as HTMLSelectElement).innerHTML = HORIZON_CHOICES
    .map((h) => `<option value="${h}">${h} days</option>`)
    .join("");

  writeForm(FORM_DEFAULTS);

  for (const id of ["delta-t2m", "aod-multiplier", "horizon"]) {
    $(id).addEventListener("input", () => {
      vm = bumpFormVersion(vm);
      renderFormLabels();
      render();
    });
  }

  $("run-scenario").addEventListener("click", () => void submitScenario());
  $("preset-stress").addEventListener("click", () => {
    writeForm({ ...readForm(), ...STRESS_PRESET });
    vm = bumpFormVersion(vm);
    void submitScenario();
  });
  $("waterfall-picker").addEventListener("change", (ev) => {
    waterfallInstance = Number((ev.target as HTMLSelectElement).value);
    render();
  });

  void loadBaseline();
  void loadAttributions();
}

document.addEventListener("DOMContentLoaded", init);
