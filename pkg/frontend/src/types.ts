/** Wire shapes of the /api/v1 surface. */

export interface MeasurementFrame {
  vrms: number;
  irms: number;
  power_factor: number;
  capacitor_engaged: boolean;
  timestamp: number;
  window_cycles: number;
  phase_rad: number;
}

export interface MeasurementsResponse {
  frame: MeasurementFrame | null;
  stale: boolean;
  error: string | null;
  timestamp?: number;
}

export interface RigConstants {
  frequency: number;
  sample_rate: number;
  v_nominal: number;
  window_cycles: number;
  scope_max_cycles: number;
}

export interface TokenRecord {
  token: string;
  slot_id: string;
  issued_at: number;
  expires_at: number;
}

export interface RigStateBody {
  capacitor_engaged: boolean;
  variac_fraction: number;
  load_fraction: number;
}

export interface WindowMessage {
  type: "window";
  t0: number;
  sample_rate: number;
  cycles: number;
  v: number[];
  i: number[];
  capacitor_engaged: boolean;
}

export interface SubscribedMessage {
  type: "subscribed";
  hz: number;
}

export interface UnsubscribedMessage {
  type: "unsubscribed";
}

export interface ErrorBody {
  error: { code: string; message: string };
}

export type ScopeMessage =
  | WindowMessage
  | SubscribedMessage
  | UnsubscribedMessage
  | ErrorBody;
