# Simulator package: V-type atom squeezing dynamics in a dissipative cavity
