# Tests de thermal_vbgmm
