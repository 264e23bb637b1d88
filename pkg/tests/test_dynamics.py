import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from floquet_raman import DriveParams, mhz, propagate_unitary, propagate_trace
from floquet_raman.dynamics import (
    IDENTITY,
    KET_0,
    SIGMA_X,
    SIGMA_Z,
    _chain,
    _exp_su2,
    hamiltonian_at,
    lab_frame_check,
    reference_unitary,
    static_unitary,
    transverse_field,
)
from floquet_raman.errors import PreconditionViolated, StepUnderflow
from floquet_raman.params import TWO_PI

US = 1.0e-6


def unitarity_defect(u):
    return np.max(np.abs(u.conj().T @ u - IDENTITY))


def test_hamiltonian_at_matches_definition(fig2c):
    t = 0.137e-6
    h = hamiltonian_at(fig2c, t).matrix
    expected = (0.5 * fig2c.delta_z * SIGMA_Z
                + (0.5 * fig2c.delta_x
                   + fig2c.amp_a * math.sin(fig2c.omega * t)) * SIGMA_X)
    assert np.allclose(h, expected)
    assert np.allclose(h, h.conj().T)
    assert abs(np.trace(h)) < 1e-12


def test_modulated_phase_reduces_to_plain(fig4):
    plain = fig4.replace(phase_mod_a=0.0)
    t = np.linspace(0, 1e-6, 17)
    assert np.allclose(transverse_field(fig4.replace(phase_mod_a=1e-30), t),
                       transverse_field(plain, t))


def test_exp_su2_against_eigendecomposition():
    rng = np.random.default_rng(5)
    for _ in range(20):
        z = rng.normal()
        c = rng.normal() + 1j * rng.normal()
        m = np.array([[z, c], [np.conj(c), -z]])
        evals, evecs = np.linalg.eigh(m)
        expected = evecs @ np.diag(np.exp(-1j * evals)) @ evecs.conj().T
        assert np.allclose(_exp_su2(z, c), expected, atol=1e-12)


def test_static_unitary_with_trace():
    h = np.array([[2.0, 1.0 - 0.5j], [1.0 + 0.5j, 0.4]])
    dt = 0.7
    evals, evecs = np.linalg.eigh(h)
    expected = evecs @ np.diag(np.exp(-1j * evals * dt)) @ evecs.conj().T
    assert np.allclose(static_unitary(h, dt), expected, atol=1e-12)


def test_chain_ordered_product():
    rng = np.random.default_rng(3)
    mats = rng.normal(size=(7, 2, 2)) + 1j * rng.normal(size=(7, 2, 2))
    expected = IDENTITY
    for m in mats:
        expected = m @ expected
    assert np.allclose(_chain(mats), expected)


def test_unitarity(fig2c):
    u = propagate_unitary(fig2c, 0.0, 2.3 * US).u
    assert unitarity_defect(u) < 1e-10


def test_norm_preservation(fig2c):
    states = propagate_trace(fig2c, KET_0, np.linspace(0, 2 * US, 41))
    norms = np.sum(np.abs(states) ** 2, axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-9


def test_composition(fig2c):
    t_mid = 0.731 * US
    u_full = propagate_unitary(fig2c, 0.0, 1.5 * US, tol=1e-10).u
    u_a = propagate_unitary(fig2c, 0.0, t_mid, tol=1e-10).u
    u_b = propagate_unitary(fig2c, t_mid, 1.5 * US, tol=1e-10).u
    assert np.max(np.abs(u_b @ u_a - u_full)) < 1e-7


def test_time_reversal(fig2c):
    # U(t0 -> t1)^dagger reproduces the initial state
    u = propagate_unitary(fig2c, 0.0, 1.0 * US, tol=1e-10).u
    state = u.conj().T @ (u @ KET_0)
    assert np.allclose(state, KET_0, atol=1e-10)


def test_propagator_matmul(fig2c):
    a = propagate_unitary(fig2c, 0.0, 0.5 * US)
    b = propagate_unitary(fig2c, 0.5 * US, 1.0 * US)
    c = b @ a
    assert c.t_start == 0.0
    assert c.t_end == 1.0 * US
    assert np.allclose(c.u, b.u @ a.u)


def test_fourth_order_convergence(fig2c):
    from floquet_raman.dynamics import _envelope, _unitary_fixed

    t1 = TWO_PI / fig2c.omega
    f = _envelope(fig2c)
    z = 0.5 * fig2c.delta_z
    exact = _unitary_fixed(z, f, 0.0, t1, 4096)
    errs = []
    for n in (8, 16, 32, 64):
        errs.append(np.max(np.abs(_unitary_fixed(z, f, 0.0, t1, n) - exact)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 4.0) < 0.3)


def test_against_reference_oracle(fig2c, fig4):
    for p in (fig2c, fig4):
        u = propagate_unitary(p, 0.0, 1.0 * US, tol=1e-10).u
        ref = reference_unitary(p, 0.0, 1.0 * US)
        assert np.max(np.abs(np.abs(u) ** 2 - np.abs(ref) ** 2)) < 1e-6


def test_t_offset_phase_continuity(fig2c):
    # splitting an interval with t_offset equals the unsplit evolution
    t_mid, t_end = 0.4 * US, 1.1 * US
    u_full = propagate_unitary(fig2c, 0.0, t_end, tol=1e-10).u
    u_a = propagate_unitary(fig2c, 0.0, t_mid, tol=1e-10).u
    u_b = propagate_unitary(fig2c, 0.0, t_end - t_mid, tol=1e-10,
                            t_offset=t_mid).u
    assert np.max(np.abs(u_b @ u_a - u_full)) < 1e-6


def test_zero_duration_is_identity(fig2c):
    assert np.allclose(propagate_unitary(fig2c, 0.3 * US, 0.3 * US).u,
                       IDENTITY)


def test_invalid_interval_raises(fig2c):
    with pytest.raises(ValueError):
        propagate_unitary(fig2c, 1.0, 0.0)
    with pytest.raises(ValueError):
        propagate_unitary(fig2c, 0.0, 1.0, tol=0.0)


def test_continuity_in_modulation_depth(fig4):
    # a -> 0 limit approaches the unmodulated propagator continuously
    t1 = 0.5 * US
    u0 = propagate_unitary(fig4.replace(phase_mod_a=0.0), 0.0, t1,
                           tol=1e-9).u
    deltas = []
    for a in (mhz(0.1), mhz(0.01)):
        u = propagate_unitary(fig4.replace(phase_mod_a=a), 0.0, t1,
                              tol=1e-9).u
        deltas.append(np.max(np.abs(u - u0)))
    assert deltas[1] < deltas[0]
    assert deltas[1] < 1e-2


@pytest.mark.filterwarnings("ignore::floquet_raman.errors.WeakDriveWarning")
@settings(max_examples=20, deadline=None)
@given(
    dz=st.floats(min_value=-15, max_value=15),
    dx=st.floats(min_value=0, max_value=15),
    amp=st.floats(min_value=0, max_value=2.5),
    t1=st.floats(min_value=0.01, max_value=2.0),
)
def test_unitarity_property(dz, dx, amp, t1):
    p = DriveParams.from_mhz(delta_z=dz, delta_x=dx, amp_a=amp, omega=7.0)
    u = propagate_unitary(p, 0.0, t1 * US, tol=1e-7).u
    assert unitarity_defect(u) < 1e-10


class TestLabFrame:
    OMEGA_D = mhz(1445.8)

    def test_precondition(self, fig2c):
        with pytest.raises(PreconditionViolated):
            lab_frame_check(fig2c, 10.0 * fig2c.omega0, 0.1 * US)

    def test_trivial_drive_agrees_exactly(self):
        # A = 0, delta_x = 0: sigma_z terms only, populations frozen
        p = DriveParams.from_mhz(delta_z=10.0, delta_x=0.0, amp_a=0.0,
                                 omega=7.0)
        dev = lab_frame_check(p, self.OMEGA_D, 0.5 * US, n_samples=51)
        assert dev < 1e-9

    def test_residual_small_at_experimental_carrier(self, fig2c):
        dev = lab_frame_check(fig2c, self.OMEGA_D, 0.5 * US, n_samples=81)
        assert dev < 0.02

    def test_residual_shrinks_with_carrier(self, fig2c):
        devs = [
            lab_frame_check(fig2c, f * self.OMEGA_D, 0.2 * US, n_samples=41)
            for f in (1.0, 2.0, 4.0)
        ]
        assert devs[2] < devs[0]
