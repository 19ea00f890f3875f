"""Interface flux tests: consistency, single-valuedness, dissipation signs."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trsw.errors import InvalidStateError
from trsw.fluxes import (
    FluxConfig,
    alpha_from_state,
    buoyancy_flux_value,
    conservative_flux,
    dissipative_flux,
    energy_jump_expression,
    entropy_jump_expression,
    mass_flux_normal,
    max_wave_speed,
    potential_flux,
)

finite = st.floats(min_value=-50.0, max_value=50.0,
                   allow_nan=False, allow_infinity=False)
positive = st.floats(min_value=0.1, max_value=50.0,
                     allow_nan=False, allow_infinity=False)


def test_upwind_buoyancy_picks_inflow_side():
    # positive mass flux through n_minus carries the minus-side value
    b_hat = buoyancy_flux_value(np.array([1.0]), np.array([3.0]),
                                np.array([2.0]), "upwind")
    assert b_hat[0] == 1.0
    # reversed transport picks the plus side
    b_hat = buoyancy_flux_value(np.array([1.0]), np.array([3.0]),
                                np.array([-2.0]), "upwind")
    assert b_hat[0] == 3.0


def test_upwind_tie_goes_to_minus():
    b_hat = buoyancy_flux_value(np.array([1.0]), np.array([3.0]),
                                np.array([0.0]), "upwind")
    assert b_hat[0] == 1.0


def test_centered_buoyancy_is_average():
    b_hat = buoyancy_flux_value(np.array([1.0]), np.array([3.0]),
                                np.array([2.0]), "zero")
    assert b_hat[0] == 2.0


def test_fixed_beta_rule():
    # beta = -1/2 with [b] = b_plus - b_minus reproduces upwinding for
    # positive mass flux
    b_hat = buoyancy_flux_value(np.array([1.0]), np.array([3.0]),
                                np.array([2.0]), "fixed", beta=-0.5)
    assert b_hat[0] == 1.0
    b_hat = buoyancy_flux_value(np.array([1.0]), np.array([3.0]),
                                np.array([2.0]), "fixed", beta=0.5)
    assert b_hat[0] == 3.0


def test_unknown_beta_rule_raises():
    with pytest.raises(ValueError):
        buoyancy_flux_value(np.array([1.0]), np.array([1.0]),
                            np.array([0.0]), "sideways")


@given(b=finite, fvec=st.tuples(finite, finite, finite),
       g_pot=finite, alpha=st.floats(min_value=0.0, max_value=5.0))
@settings(max_examples=60, deadline=None)
def test_consistency_equal_traces(b, fvec, g_pot, alpha):
    """Equal traces collapse every flux to the pointwise value."""
    f = np.array([fvec])
    n = np.array([[1.0, 0.0, 0.0]])
    fn = mass_flux_normal(f, f, n)
    assert fn[0] == f[0, 0]
    g_hat, jump = potential_flux(np.array([g_pot]), np.array([g_pot]),
                                 f, f, n, alpha)
    assert g_hat[0] == g_pot and jump[0] == 0.0
    for rule in ("zero", "upwind"):
        b_hat = buoyancy_flux_value(np.array([b]), np.array([b]), fn, rule)
        assert b_hat[0] == b


@given(bm=finite, bp=finite, fm=st.tuples(finite, finite, finite),
       fp=st.tuples(finite, finite, finite), gm=finite, gp=finite,
       alpha=st.floats(min_value=0.0, max_value=5.0))
@settings(max_examples=60, deadline=None)
def test_single_valued_under_relabeling(bm, bp, fm, fp, gm, gp, alpha):
    """Swapping sides and flipping the normal leaves the flux physics alone.

    F_hat . n flips sign with the normal, G_hat and b_hat are unchanged,
    and B_hat . n = b_hat (F_hat . n) flips with it.
    """
    f_m, f_p = np.array([fm]), np.array([fp])
    n = np.array([[0.0, 1.0, 0.0]])
    fn = mass_flux_normal(f_m, f_p, n)
    fn_swap = mass_flux_normal(f_p, f_m, -n)
    assert np.allclose(fn_swap, -fn, atol=1e-12)

    g_hat, _ = potential_flux(np.array([gm]), np.array([gp]), f_m, f_p, n, alpha)
    g_swap, _ = potential_flux(np.array([gp]), np.array([gm]), f_p, f_m, -n, alpha)
    assert np.allclose(g_swap, g_hat, atol=1e-12)

    b_hat = buoyancy_flux_value(np.array([bm]), np.array([bp]), fn, "upwind")
    b_swap = buoyancy_flux_value(np.array([bp]), np.array([bm]), fn_swap, "upwind")
    if fn[0] != 0.0:  # at a tie both sides legitimately pick their own trace
        assert b_swap[0] == b_hat[0]


@given(bm=finite, bp=finite, fn=finite)
@settings(max_examples=100, deadline=None)
def test_entropy_jump_sign(bm, bp, fn):
    """Upwind b_hat never produces interface entropy; centered is neutral."""
    b_m, b_p, fn_arr = np.array([bm]), np.array([bp]), np.array([fn])
    up = buoyancy_flux_value(b_m, b_p, fn_arr, "upwind")
    assert entropy_jump_expression(b_m, b_p, up, fn_arr)[0] <= 1e-12
    cen = buoyancy_flux_value(b_m, b_p, fn_arr, "zero")
    assert entropy_jump_expression(b_m, b_p, cen, fn_arr)[0] == 0.0


def test_entropy_jump_closed_form():
    # upwind: [b](b_hat - {b}) Fn = -|Fn| [b]^2 / 2
    b_m, b_p = np.array([1.0]), np.array([3.0])
    for fn in (2.0, -2.0):
        fn_arr = np.array([fn])
        up = buoyancy_flux_value(b_m, b_p, fn_arr, "upwind")
        got = entropy_jump_expression(b_m, b_p, up, fn_arr)[0]
        assert got == pytest.approx(-0.5 * abs(fn) * 4.0)


@given(fm=st.tuples(finite, finite, finite), fp=st.tuples(finite, finite, finite),
       alpha=st.floats(min_value=0.0, max_value=5.0))
@settings(max_examples=60, deadline=None)
def test_energy_jump_sign(fm, fp, alpha):
    f_m, f_p = np.array([fm]), np.array([fp])
    n = np.array([[0.0, 0.0, 1.0]])
    _, jump = potential_flux(np.zeros(1), np.zeros(1), f_m, f_p, n, alpha)
    assert energy_jump_expression(jump, alpha)[0] <= 0.0


def test_wave_speed_and_alpha():
    u = np.zeros((2, 3, 3))
    h = np.full((2, 3), 2.5)
    b = np.full((2, 3), 10.0)
    assert max_wave_speed(u, h, b) == pytest.approx(5.0)
    assert alpha_from_state(u, h, b, g=10.0) == pytest.approx(1.0)
    u[1, 2] = [3.0, 4.0, 0.0]  # |u| = 5 at one node
    assert max_wave_speed(u, h, b) == pytest.approx(10.0)


def test_wave_speed_rejects_bad_state():
    u = np.zeros((1, 1, 3))
    with pytest.raises(InvalidStateError):
        max_wave_speed(u, np.array([[-1.0]]), np.array([[10.0]]))
    with pytest.raises(InvalidStateError):
        max_wave_speed(u, np.array([[1.0]]), np.array([[0.0]]))


def test_mode_invariants():
    cons = conservative_flux()
    assert cons.resolve_alpha(g=9.8, c=100.0) == 0.0
    assert cons.effective_beta_rule == "zero"

    diss = dissipative_flux(c_ref=49.0)
    assert diss.effective_beta_rule == "upwind"
    assert diss.resolve_alpha(g=9.8, c=49.0) == pytest.approx(0.1)
    # falls back to the seed speed when no state-derived c is supplied
    assert diss.resolve_alpha(g=9.8) == pytest.approx(0.1)

    custom = FluxConfig(mode="custom", alpha=0.25, beta_rule="fixed", beta=0.5)
    assert custom.resolve_alpha(g=9.8, c=1.0) == 0.25
    assert custom.effective_beta_rule == "fixed"


def test_config_validation():
    with pytest.raises(ValueError):
        FluxConfig(mode="smooth")
    with pytest.raises(ValueError):
        FluxConfig(mode="custom")  # alpha missing
    with pytest.raises(ValueError):
        FluxConfig(mode="custom", alpha=-1.0, beta_rule="zero")
    with pytest.raises(ValueError):
        FluxConfig(mode="custom", alpha=0.1, beta_rule="diagonal")
    with pytest.raises(InvalidStateError):
        dissipative_flux().resolve_alpha(g=9.8)  # no speed available yet
