"""SI conversion constants accepted at the configuration boundary."""

MD_TO_M2 = 9.869233e-16
PSI_TO_PA = 6894.757
BAR_TO_PA = 1.0e5
CP_TO_PA_S = 1.0e-3
