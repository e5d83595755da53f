"""Win-stay lose-shift minority game solver and simulator."""

from ._minority import (
    ConfigError,
    DomainError,
    NumericError,
    StrategyConfig,
    Trajectory,
    UsageError,
    __version__,
    c_autocorrelation,
    cli,
    convergence_time,
    delta_histogram,
    expected_payoffs,
    fit_decay_rate,
    indifference_residual,
    inefficiency_eta,
    infeasibility_scan,
    kpr_run,
    lambda_gap,
    lambda_table,
    payoff_curve,
    run,
    s_autocorrelation,
    solve_lambda,
    solve_p_finite,
    verify_no_cheat,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "NumericError",
    "StrategyConfig",
    "Trajectory",
    "UsageError",
    "__version__",
    "c_autocorrelation",
    "cli",
    "convergence_time",
    "delta_histogram",
    "expected_payoffs",
    "fit_decay_rate",
    "indifference_residual",
    "inefficiency_eta",
    "infeasibility_scan",
    "kpr_run",
    "lambda_gap",
    "lambda_table",
    "payoff_curve",
    "run",
    "s_autocorrelation",
    "solve_lambda",
    "solve_p_finite",
    "verify_no_cheat",
]
