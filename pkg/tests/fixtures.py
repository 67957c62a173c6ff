"""Frozen oracle values (regenerate with ``python tests/oracles.py``)."""

# Exact threshold error of the dual-basis estimator, N=1, M=128, uniform (bit, l).
SINGLE_PHOTON_EVE_ERROR_M128 = 0.37203019482120014

# Period-15 output of the 4-bit LFSR, taps {4, 3}, cells 0001 (cell 1 first),
# stepped by hand with tests.oracles.lfsr_outputs_by_hand.
M_SEQUENCE_4 = [1, 0, 0, 1, 1, 0, 1, 0, 1, 1, 1, 1, 0, 0, 0]

# 1 - H2(0.11), evaluated in closed form with math.log2
BSC_011_CAPACITY = 0.500084041835472
