"""
Gibbs sampling for the Chinese restaurant franchise.

Each sweep reassigns every instance to a table and then every table to a
dish, in a fixed scan order (groups, instances, then tables), so a chain is
reproducible from its seed.
"""

import logging

import numpy as np
from scipy.special import logsumexp

from osr_project.exceptions import ConfigurationError, EmptyGroupError, InvalidInputError

from .categorical import sample_log_categorical
from .concentrations import resample_concentrations, resolve_concentrations
from .state import CRFState

logger = logging.getLogger(__name__)


def init_state(groups, conc, prior, init_components, rng, likelihood=None):
    """
    Seat every instance on one of ``init_components`` shared dishes.

    Within each group instances are dealt round-robin (in a random order) onto
    min(init_components, n_j) tables; table r of every group serves the r-th
    shared dish. Only the last group (the test batch) may be empty.
    """
    if init_components < 1:
        raise InvalidInputError(
            f"init_components must be at least 1, got {init_components}."
        )
    sizes = [len(x) for x in groups.groups]
    if not sizes or sum(sizes) == 0:
        raise EmptyGroupError("Cannot co-cluster groups without instances.")
    empty = [j for j, n in enumerate(sizes[:-1]) if n == 0]
    if empty:
        raise EmptyGroupError(f"Groups {empty} have no instances.")

    state = CRFState(groups, prior, resolve_concentrations(conc, rng), likelihood)
    shared = []
    for j, n_j in enumerate(sizes):
        if n_j == 0:
            continue
        tables = []
        for r in range(min(init_components, n_j)):
            dish = shared[r] if r < len(shared) else None
            tt = state.open_table(j, dish)
            if dish is None:
                shared.append(state.table_dish[j][tt])
            tables.append(tt)

        for position, i in enumerate(rng.permutation(n_j)):
            state.seat(j, int(i), tables[position % len(tables)])

    return state


def dish_prior_log_weights(state):
    """
    Log prior weights of the dish served at a freshly opened table.

    Returns ``(dishes, log_weights)`` where ``log_weights`` has one entry per
    live dish, log(m_.k / (m_.. + gamma)), followed by the new-dish entry
    log(gamma / (m_.. + gamma)).
    """
    dishes = state.dishes
    m = np.array([state.m_dish[k] for k in dishes], dtype=float)
    log_total = np.log(m.sum() + state.conc.gamma)
    log_weights = np.append(np.log(m), np.log(state.conc.gamma)) - log_total
    return dishes, log_weights


def sample_table(state, j, i, rng):
    """
    Resample the table of instance (j, i).

    Existing table t has weight n_jt * f_{k_jt}(x); a new table has weight
    alpha0 * p(x | new table), where the new table's dish is a mixture of the
    live dishes and a brand-new one. The new table's dish is drawn from that
    same mixture.
    """
    x = state.point(j, i)
    state.unseat(j, i)

    dishes, prior_log_w = dish_prior_log_weights(state)
    log_f, log_f_new = state.likelihood.log_predictive(x, dishes, state.dish_stats)
    dish_log_w = prior_log_w + np.append(log_f, log_f_new)
    log_p_new_table = logsumexp(dish_log_w)

    position = {k: pos for pos, k in enumerate(dishes)}
    tables = state.tables(j)
    table_log_w = np.empty(len(tables) + 1)
    for slot, tt in enumerate(tables):
        table_log_w[slot] = np.log(state.n_table[j][tt]) + log_f[
            position[state.table_dish[j][tt]]
        ]
    table_log_w[-1] = np.log(state.conc.alpha0) + log_p_new_table

    choice = sample_log_categorical(table_log_w, rng)
    if choice < len(tables):
        tt = tables[choice]
    else:
        dish_choice = sample_log_categorical(dish_log_w, rng)
        dish = dishes[dish_choice] if dish_choice < len(dishes) else None
        tt = state.open_table(j, dish)

    state.seat(j, i, tt)
    state.maybe_refresh()
    return state


def sample_dish(state, j, tt, rng):
    """
    Resample the dish of table (j, tt).

    Existing dish k has weight m_.k * f_k(x_jt), a new dish gamma * f_new(x_jt),
    where f is the joint density of all the table's instances.
    """
    stats = state.detach_table(j, tt)

    dishes = state.dishes
    m = np.array([state.m_dish[k] for k in dishes], dtype=float)
    log_f, log_f_new = state.likelihood.log_marginal(stats, dishes, state.dish_stats)
    log_w = np.append(np.log(m) + log_f, np.log(state.conc.gamma) + log_f_new)

    choice = sample_log_categorical(log_w, rng)
    dish = dishes[choice] if choice < len(dishes) else None
    state.attach_table(j, tt, stats, dish)
    state.maybe_refresh()
    return state


def gibbs_sweep(state, rng):
    """One pass of table moves for every instance, then dish moves for every table."""
    for j in range(state.J):
        for i in range(len(state.t[j])):
            sample_table(state, j, i, rng)

    for j in range(state.J):
        for tt in state.tables(j):
            sample_dish(state, j, tt, rng)

    if state.conc.resample:
        state.conc = resample_concentrations(state, rng)
    return state


def run_chain(groups, config, rng, likelihood=None):
    """
    Initialize the franchise and run ``config.T`` Gibbs sweeps.

    Returns the final state; a single co-clustering is what the recognition
    rule consumes.
    """
    if config.prior is None:
        raise ConfigurationError("The chain needs a resolved Normal-Wishart prior.")
    if config.T < 0:
        raise ConfigurationError(f"Number of sweeps must be non-negative, got {config.T}.")

    state = init_state(
        groups, config.conc, config.prior, config.init_components, rng, likelihood
    )
    for sweep in range(1, config.T + 1):
        gibbs_sweep(state, rng)
        logger.info(
            f"Sweep {sweep}/{config.T}: K={state.K} tables={state.total_tables}"
            + (
                f" gamma={state.conc.gamma:.3g} alpha0={state.conc.alpha0:.3g}"
                if state.conc.resample
                else ""
            )
        )
    return state
