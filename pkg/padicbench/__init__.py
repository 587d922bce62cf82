# p-adic harmonic analysis workbench
