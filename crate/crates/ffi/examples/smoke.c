#include <stdio.h>
#include "photon_dwell.h"
int main(void) {
  PdPulse *p; PdMedium *m; PdDelayReport r;
  if (pd_pulse_gaussian(1.0, 0.0, &p) != PD_STATUS_OK) return 1;
  if (pd_medium_uniform(2.0, 1.0, &m) != PD_STATUS_OK) return 1;
  if (pd_analyze(p, m, &r) != PD_STATUS_OK) return 1;
  printf("tau_t=%g tau_s=%g\n", r.tau_t, r.tau_s);
  if (pd_pulse_gaussian(-1.0, 0.0, &p) != PD_STATUS_INVALID_PARAMETER) return 1;
  printf("err=%s\n", pd_last_error_message());
  pd_pulse_free(p); pd_medium_free(m);
  return 0;
}
