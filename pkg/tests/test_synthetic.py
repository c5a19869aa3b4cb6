import numpy as np
import pytest

from fusionrank.geometry import kabsch_rmsd
from fusionrank.rama import marginalize_ss8
from fusionrank.scoring import annotate, angle_consistency, ss_aggregate
from fusionrank.synthetic import moment_matched_sample, priors_from_native, synthetic_fragment


def test_priors_from_native_is_self_consistent():
    case = synthetic_fragment(5, 8)
    native_ann = annotate(case.native)
    assert ss_aggregate(native_ann, case.priors) == 0.0
    assert angle_consistency(native_ann, case.priors) == 0.0
    assert np.allclose(marginalize_ss8(case.priors.ss8), case.priors.ss3)


def test_fragment_contract():
    case = synthetic_fragment(11, 7, n_candidates=5, resolution=2.0)
    assert len(case.candidates) == 5
    ids = [c.id for c in case.candidates]
    assert len(set(ids)) == 5
    assert min(case.rmsd(i) for i in ids) == 0.0
    assert all(c.energy_q % 2.0 == 0 for c in case.candidates)
    again = synthetic_fragment(11, 7, n_candidates=5, resolution=2.0)
    assert [c.id for c in again.candidates] == ids
    assert kabsch_rmsd(again.native, case.native) == 0.0


def test_moment_sample_rejects_bad_requests():
    with pytest.raises(ValueError):
        moment_matched_sample(4, 1, 1, 1, 0, 2)
    with pytest.raises(ValueError):
        moment_matched_sample(11, 5.0, 5.0, 10.0, 4.0, 6.0)


@pytest.mark.parametrize("seed", range(6))
def test_moment_sample_hits_all_five_moments(seed):
    target = (6.85, 6.79, 1.92, 3.17, 14.51)
    x = moment_matched_sample(75, *target, seed=seed)
    got = (x.mean(), np.median(x), x.std(ddof=1), x.min(), x.max())
    assert np.allclose(got, target, atol=1e-9, rtol=0)
