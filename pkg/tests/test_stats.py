import json
from collections import namedtuple
from itertools import combinations

import numpy as np
import pytest

from gaze_expertise.core.errors import ParameterError
from gaze_expertise.core.schemas import Label
from gaze_expertise.detection.idt import detect_fixations
from gaze_expertise.features.extract import WindowFeatureExtractor
from gaze_expertise.features.metrics import average_fixation_duration
from gaze_expertise.stats.groups import compare_groups, split_by_label
from gaze_expertise.stats.mann_whitney import EXACT_LIMIT, mann_whitney_u
from gaze_expertise.synth.generator import generate_cohort
from gaze_expertise.synth.profiles import BehaviorProfile, SynthSpec

Item = namedtuple("Item", "afd_ms fc aed label")


def _pairwise_u(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float((a[:, None] > b[None, :]).sum() + 0.5 * (a[:, None] == b[None, :]).sum())


def _permutation_oracle(a, b) -> tuple[float, float]:
    """U by pairwise counting and the exact two-sided p over every relabelling of the pooled sample."""
    pooled = np.r_[a, b]
    n, n1 = pooled.size, len(a)
    cmp = (pooled[:, None] > pooled[None, :]) + 0.5 * (pooled[:, None] == pooled[None, :])
    subsets = np.array(list(combinations(range(n), n1)))
    members = np.zeros((len(subsets), n))
    np.put_along_axis(members, subsets, 1.0, axis=1)
    u_all = ((members @ cmp) * (1.0 - members)).sum(axis=1)
    u_obs = _pairwise_u(a, b)
    mu = n1 * (n - n1) / 2.0
    p = float(np.mean(np.abs(u_all - mu) >= abs(u_obs - mu) - 1e-9))
    return u_obs, p


@pytest.mark.parametrize(
    "a, b, u",
    [([1, 2, 3], [4, 5, 6], 0.0), ([1, 3], [2, 4], 1.0), ([1, 2], [2, 3], 0.5)],
)
def test_u_examples(a, b, u):
    assert mann_whitney_u(a, b).u_statistic == u


def test_u_is_complementary():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = rng.integers(0, 6, rng.integers(1, 15))
        b = rng.integers(0, 6, rng.integers(1, 15))
        assert mann_whitney_u(a, b).u_statistic + mann_whitney_u(b, a).u_statistic == a.size * b.size


def test_exact_path_matches_permutation_oracle():
    rng = np.random.default_rng(1)
    for n1 in range(1, EXACT_LIMIT + 1):
        for n2 in range(1, EXACT_LIMIT // n1 + 1):
            # small integer support so that ties are common
            a = rng.integers(0, 5, n1).astype(float)
            b = rng.integers(0, 5, n2).astype(float)
            result = mann_whitney_u(a, b)
            u, p = _permutation_oracle(a, b)
            assert result.method == "exact"
            assert result.u_statistic == pytest.approx(u, abs=1e-9)
            assert result.p_value == pytest.approx(p, abs=1e-9)


def test_normal_approximation_close_to_exact():
    rng = np.random.default_rng(2)
    for _ in range(20):
        values = rng.permutation(rng.normal(size=16))
        a, b = values[:8], values[8:] + rng.uniform(0.0, 1.5)
        exact = mann_whitney_u(a, b, method="exact")
        normal = mann_whitney_u(a, b, method="normal")
        assert abs(exact.p_value - normal.p_value) < 0.05


def test_large_samples_use_normal_approximation():
    rng = np.random.default_rng(3)
    result = mann_whitney_u(rng.normal(size=30), rng.normal(size=30))
    assert result.method == "normal"
    assert 0.0 <= result.p_value <= 1.0


def test_shift_invariance():
    rng = np.random.default_rng(4)
    a, b = rng.normal(size=12), rng.normal(0.5, size=15)
    base, shifted = mann_whitney_u(a, b), mann_whitney_u(a + 7.0, b + 7.0)
    assert shifted.u_statistic == base.u_statistic
    assert shifted.p_value == pytest.approx(base.p_value, abs=1e-12)


def test_identical_groups_not_significant():
    values = list(np.random.default_rng(5).normal(size=10))
    result = mann_whitney_u(values, list(values))
    assert result.p_value == pytest.approx(1.0)
    assert not result.significant


def test_all_tied_values():
    result = mann_whitney_u([2.0] * 10, [2.0] * 10)
    assert result.u_statistic == 50.0
    assert result.p_value == 1.0


@pytest.mark.parametrize("a, b, kwargs", [([], [1.0], {}), ([1.0], [], {}), ([1.0], [2.0], {"alpha": 1.5})])
def test_invalid_input(a, b, kwargs):
    with pytest.raises(ParameterError):
        mann_whitney_u(a, b, **kwargs)


class TestCompareGroups:
    def _groups(self, seed: int = 0):
        rng = np.random.default_rng(seed)

        def draw(n, afd, fc, aed, label):
            return [
                Item(rng.lognormal(np.log(afd), 0.4), rng.poisson(fc), rng.lognormal(np.log(aed), 0.4), label)
                for _ in range(n)
            ]

        expert = draw(60, 220.0, 15, 0.08, Label.EXPERT)
        novice = draw(80, 380.0, 9, 0.15, Label.NON_EXPERT)
        return expert, novice

    def test_directions_on_shifted_groups(self):
        report = compare_groups(*self._groups())
        assert report.feature("afd_ms").direction == "expert lower"
        assert report.feature("fc").direction == "expert higher"
        assert report.feature("aed").direction == "expert lower"
        assert all(item.significant for item in report.features)
        assert report.feature("afd_ms").n1 == 60

    def test_identical_groups(self):
        expert, _ = self._groups()
        report = compare_groups(expert, list(expert))
        assert all(not item.significant for item in report.features)
        assert all(item.direction == "equal" for item in report.features)

    def test_split_by_label(self):
        expert, novice = self._groups()
        a, b = split_by_label(novice + expert)
        assert len(a) == 60 and len(b) == 80

    def test_empty_group(self):
        with pytest.raises(ParameterError):
            compare_groups([], self._groups()[1])

    def test_json_report(self, tmp_path):
        path = compare_groups(*self._groups(), granularity="image").write(tmp_path / "stats.json")
        payload = json.loads(path.read_text())
        assert payload["granularity"] == "image"
        assert {f["feature"] for f in payload["features"]} == {"afd_ms", "fc", "aed"}
        assert set(payload["features"][0]) >= {"u", "p", "n1", "n2", "direction", "significant"}

    def test_synthetic_cohort_directions(self, small_cohort):
        windows = [w for s in small_cohort for w in WindowFeatureExtractor(5.0).invoke(s)]
        report = compare_groups(*split_by_label(windows))
        assert report.feature("afd_ms").direction == "expert lower"
        assert report.feature("fc").direction == "expert higher"
        assert report.feature("aed").direction == "expert lower"
        assert all(item.significant for item in report.features)


@pytest.mark.slow
def test_false_positive_rate_between_identical_groups():
    """Sessions drawn from one profile and split into two groups: p-values behave like a null."""
    profile = BehaviorProfile.non_expert()
    p_values = []
    for repetition in range(100):
        spec = SynthSpec(n_experts=8, n_nonexperts=8, images_per_session=1, seed=1000 + repetition)
        sessions = generate_cohort(profile, profile, spec)
        afd = {s.participant_id: average_fixation_duration(detect_fixations(s.track)) for s in sessions}
        expert, nonexpert = split_by_label(sessions)
        result = mann_whitney_u([afd[s.participant_id] for s in expert], [afd[s.participant_id] for s in nonexpert])
        assert result.method == "exact"
        p_values.append(result.p_value)
    p_values = np.array(p_values)
    assert np.mean(p_values < 0.05) <= 0.12
    assert 0.4 <= p_values.mean() <= 0.65
