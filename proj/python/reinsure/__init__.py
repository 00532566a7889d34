from ._reinsure import (
    ClaimDistribution,
    ConfigError,
    Contract,
    DegenerateObservation,
    DomainError,
    MarketParams,
    ModelSpec,
    NumericalError,
    PremiumSpec,
    Principle,
    Solution,
    StabilityError,
    exp_moment,
    expected_utility,
    full_info_retention,
    insurer_premium,
    jump_update,
    ks_rhs,
    load_scenario,
    mgf,
    propagate,
    reinsurance_premium,
    retained,
    solve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
