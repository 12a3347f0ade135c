"""Tunable knobs; all computation stays exact regardless of the settings."""

# Full multivariate GCD reduction is attempted only when both operands
# have at most this many terms.  Above the budget only monomial/content
# reduction runs; equality testing cross-multiplies, so results are exact
# either way.
GCD_TERM_BUDGET = 5000
