// API response shapes, field for field as the service emits them.
// Snake case is kept so nothing is renamed between wire and view.

export interface ScenarioEcho {
  delta_t2m: number;
  aod_multiplier: number;
  label: string;
}

export interface ForecastResponse {
  schema_version: number;
  start_date: string;
  horizon: number;
  aod: number[];
  efficiency_loss_pct: number[];
  solar_efficiency_pct: number[];
  scenario: ScenarioEcho | null;
}

export interface Directive {
  date: string;
  severity: string;
  ro_pressure_delta_pct: number;
  robotic_cleaning: boolean;
  chemical_cleaning_deferral_h: number;
  grid_import_increase_pct: number;
  pretreatment: boolean;
  throughput_mode: string;
  rationale: string[];
}

export interface DirectivesResponse {
  schema_version: number;
  horizon: number;
  directives: Directive[];
}

export interface AttributionReport {
  feature_names: string[];
  base_value: number;
  mean_abs_phi: number[];
  std_abs_phi: number[];
  rank: number[];
  mode: string;
  per_instance_phi: number[][];
  predictions: number[];
}

export interface Stage1Attributions {
  schema_version: number;
  stage: number;
  static: AttributionReport;
  temporal: AttributionReport;
}

export interface Stage2Attributions {
  schema_version: number;
  stage: number;
  report: AttributionReport;
}

export interface ScenarioRequestBody {
  delta_t2m: number;
  aod_multiplier: number;
  horizon: number;
}
