"""Numeric tolerances used throughout the package.

All dimensions are capped at DIM_CAP, which keeps conditioning benign and
justifies flat absolute tolerances (Frobenius / 2-norm).
"""

# Operator-norm tolerance for matrix identities.
TOL_OP = 1e-10

# 2-norm tolerance for vector identities.
TOL_VEC = 1e-10

# Tolerance on |norm - 1| for unit kets.
TOL_NORM = 1e-12

# Tolerance for probabilities (quadratic forms).
TOL_PROB = 1e-9

# Minimum gap between distinct eigenvalues when grouping a spectrum.
GROUPING_TOL = 1e-8

# Verdict thresholds: residuals <= PASS_TOL pass, residuals > FAIL_TOL fail,
# anything in between is reported as indeterminate rather than forced into
# a boolean.
PASS_TOL = 1e-8
FAIL_TOL = 1e-4

# Relative spectral cutoff for rank decisions (entanglement detection).
RANK_CUTOFF = 1e-9

# Hard cap on any Hilbert-space dimension handled by this package.
DIM_CAP = 64
