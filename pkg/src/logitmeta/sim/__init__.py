"""Monte Carlo simulation of logit dynamics."""
from ._backend import BACKEND, compiled_available, get_kernels
from .dynamics import (
    Censored,
    CoupledPair,
    CouplingStats,
    HittingSamples,
    SimConfig,
    Target,
    TVBoundEstimate,
    Trajectories,
    counts_to_row,
    coupled_run,
    dkw_half_width,
    empirical_tv_bound,
    hitting_time_sample,
    hitting_times,
    kernel_table,
    minimal_elements,
    monotone_coupled_step,
    one_step_counts,
    or_coupled_step,
    precedes,
    simulate,
    step,
)
