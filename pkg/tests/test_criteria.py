import numpy as np
import pytest
from scipy.stats import ortho_group, unitary_group

from bek import criteria
from bek.states import QUTRITS, flagged_mixture, rho_pent, werner
from bek.tensor_core import Layout, Operator, tensor
from conftest import random_density


def local(rho, ua, ub):
    u = np.kron(ua, ub)
    return Operator(u @ rho.matrix @ u.conj().T, rho.layout)


@pytest.mark.parametrize("lam", [2.0, 2.33, 5.0, 50.0])
def test_werner_pt_eigenvalue(lam):
    npt, val = criteria.peres_horodecki(werner(lam))
    assert npt
    assert val == pytest.approx(-1 / (8 * lam - 1), abs=1e-12)


def test_peres_horodecki_examples():
    npt, val = criteria.peres_horodecki(rho_pent())
    assert not npt and abs(val) < 1e-12
    npt, val = criteria.peres_horodecki(Operator(np.eye(9) / 9, QUTRITS))
    assert not npt and val == pytest.approx(1 / 9)
    with pytest.raises(ValueError):
        criteria.peres_horodecki(Operator(np.eye(3) / 3, Layout.of((3, "A"))))


def test_reduction_examples():
    # rho_A = 1/3 for rho_W(2): 1/3 - {1/15, 1/5} leaves min 2/15
    ok, ra, rb = criteria.reduction_criterion(werner(2.0))
    assert ok
    assert ra == pytest.approx(2 / 15, abs=1e-12) and rb == pytest.approx(2 / 15, abs=1e-12)
    ok, ra, rb = criteria.reduction_criterion(rho_pent())
    assert ok and min(ra, rb) > 0
    ok, ra, rb = criteria.reduction_criterion(tensor(werner(2.0), rho_pent()))
    assert ok and min(ra, rb) >= -1e-9


def test_reduction_detects_pure_entangled():
    psi = np.zeros(9)
    psi[[0, 4, 8]] = 1 / np.sqrt(3)
    ok, ra, rb = criteria.reduction_criterion(Operator(np.outer(psi, psi), QUTRITS))
    # 1/3 * 1 - |Psi><Psi| has eigenvalue 1/3 - 1 on |Psi>
    assert not ok and ra == pytest.approx(-2 / 3, abs=1e-12)


def test_reduction_uses_party_labels_not_position():
    rho = tensor(werner(2.0), rho_pent())
    moved = Operator(rho.matrix, rho.layout)
    from bek.tensor_core import permute_subsystems
    reordered = permute_subsystems(moved, [0, 2, 1, 3])
    assert criteria.reduction_criterion(rho) == pytest.approx(
        criteria.reduction_criterion(reordered), abs=1e-12)


def _psi_state():
    psi = np.zeros(9)
    psi[[0, 4, 8]] = 1 / np.sqrt(3)
    return Operator(np.outer(psi, psi), QUTRITS)


def _corpus():
    return [werner(2.0), rho_pent(), werner(0.5), _psi_state()]


@pytest.mark.parametrize("i", range(4))
@pytest.mark.parametrize("j", range(4))
def test_reduction_product_agrees_with_factors(i, j):
    r1, r2 = _corpus()[i], _corpus()[j]
    both = criteria.reduction_criterion(r1)[0] and criteria.reduction_criterion(r2)[0]
    assert criteria.reduction_criterion(tensor(r1, r2))[0] == both


def test_reduction_violation_can_be_diluted():
    # only "both satisfy => product satisfies" holds in general
    mixed = Operator(np.eye(9) / 9, QUTRITS)
    assert not criteria.reduction_criterion(_psi_state())[0]
    assert criteria.reduction_criterion(tensor(mixed, _psi_state()))[0]


def test_reduction_random_states_satisfying_pairs(rng):
    # satisfying factors always give a satisfying product
    found = 0
    while found < 5:
        r1 = Operator(random_density(rng, 9), QUTRITS)
        if not criteria.reduction_criterion(r1)[0]:
            continue
        found += 1
        assert criteria.reduction_criterion(tensor(r1, rho_pent()))[0]


def test_ppt_invariance_examples():
    inv, dev = criteria.ppt_invariance(rho_pent())
    assert inv and dev <= 1e-12
    inv, dev = criteria.ppt_invariance(werner(2.0))
    assert not inv and dev > 0.05
    inv, dev = criteria.ppt_invariance(Operator(np.diag(np.arange(1, 10) / 45), QUTRITS))
    assert inv and dev == 0


@pytest.mark.parametrize("seed", range(5))
def test_verdicts_stable_under_local_unitaries(seed):
    ua = unitary_group.rvs(3, random_state=seed)
    ub = unitary_group.rvs(3, random_state=seed + 50)
    for rho in (werner(2.0), rho_pent(), werner(0.6)):
        rot = local(rho, ua, ub)
        assert criteria.peres_horodecki(rot)[0] == criteria.peres_horodecki(rho)[0]
        assert criteria.reduction_criterion(rot)[0] == criteria.reduction_criterion(rho)[0]
    oa, ob = ortho_group.rvs(3, random_state=seed), ortho_group.rvs(3, random_state=seed + 7)
    assert criteria.ppt_invariance(local(rho_pent(), oa, ob))[0]


def test_report_fields():
    rep = criteria.report(flagged_mixture(rho_pent(), werner(2.0)))
    # the NPT branch survives the flag
    assert rep.npt
    assert rep.min_pt_eigenvalue == pytest.approx(-1 / 30, abs=1e-12)
    assert rep.reduction_ok
    assert set(rep.to_dict()) >= {"npt", "min_pt_eigenvalue", "reduction_ok",
                                  "min_reduction_eigenvalues", "ppt_invariant"}
