import json
from types import SimpleNamespace

import numpy as np
import pandas as pd
import pytest

from gaze_expertise.core.errors import ParameterError, UndefinedMetricError
from gaze_expertise.core.schemas import Label
from gaze_expertise.evaluation.batch import extract_cohort, resolve_phase_filter, run_batch
from gaze_expertise.evaluation.roc import auroc, mean_roc, roc_curve, write_roc_csv
from gaze_expertise.evaluation.splits import make_split
from gaze_expertise.evaluation.traces import SoftmaxTrace, TracePoint, compare_phase_scores, softmax_trace
from gaze_expertise.features.normalize import fit_normalizer, normalize_all
from gaze_expertise.models.multistream import ModelConfig, init_model
from gaze_expertise.models.training import TrainConfig, train
from gaze_expertise.synth.generator import ProfileSegment, generate_cohort, simulate_session
from gaze_expertise.synth.profiles import BehaviorProfile, SynthSpec
from gaze_expertise.windowing.slicing import PhaseTag
from gaze_expertise.windowing.spans import generate_windows


def _pairwise_auroc(scores, labels) -> float:
    s, y = np.asarray(scores), np.asarray(labels, dtype=bool)
    pos, neg = s[y], s[~y]
    wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    return float(wins / (pos.size * neg.size))


class TestAuroc:
    @pytest.mark.parametrize(
        "scores, labels, expected",
        [
            ([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0], 1.0),
            ([0.9, 0.3, 0.5, 0.1], [1, 1, 0, 0], 0.75),
            ([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0], 0.5),
        ],
    )
    def test_examples(self, scores, labels, expected):
        assert auroc(scores, labels) == expected

    def test_matches_pairwise_counting(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            n = int(rng.integers(2, 201))
            labels = rng.integers(0, 2, n)
            labels[:2] = [0, 1]
            # coarse rounding keeps ties frequent
            scores = np.round(rng.uniform(size=n), int(rng.integers(1, 4)))
            assert auroc(scores, labels) == pytest.approx(_pairwise_auroc(scores, labels), abs=1e-12)

    def test_flipped_labels(self):
        rng = np.random.default_rng(1)
        scores, labels = rng.normal(size=50), rng.integers(0, 2, 50)
        assert auroc(scores, labels) + auroc(scores, 1 - labels) == pytest.approx(1.0)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(2)
        scores, labels = rng.normal(size=40), np.arange(40) % 2
        assert auroc(np.exp(3.0 * scores), labels) == auroc(scores, labels)

    def test_label_values(self):
        labels = [Label.EXPERT, Label.EXPERT, Label.NON_EXPERT, Label.NON_EXPERT]
        assert auroc([0.9, 0.3, 0.5, 0.1], labels) == 0.75

    def test_single_class_undefined(self):
        with pytest.raises(UndefinedMetricError):
            auroc([0.1, 0.2, 0.3], [1, 1, 1])


class TestRocCurve:
    def test_curve_shape_and_area(self):
        rng = np.random.default_rng(3)
        scores, labels = np.round(rng.normal(size=60), 1), np.arange(60) % 2
        curve = roc_curve(scores, labels)
        fpr, tpr = np.array(curve.fpr), np.array(curve.tpr)
        assert (fpr[0], tpr[0]) == (0.0, 0.0)
        assert (fpr[-1], tpr[-1]) == (1.0, 1.0)
        assert np.all(np.diff(fpr) >= 0) and np.all(np.diff(tpr) >= 0)
        area = np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0)
        assert area == pytest.approx(curve.auroc, abs=1e-12)

    def test_mean_of_perfect_curves(self):
        perfect = roc_curve([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
        mean = mean_roc([perfect, perfect])
        assert mean.auroc == pytest.approx(1.0)
        assert mean.fpr[0] == 0.0 and mean.tpr[-1] == 1.0

    def test_mean_of_chance_curves(self):
        chance = roc_curve([0.5, 0.5], [1, 0])
        assert mean_roc([chance]).auroc == pytest.approx(0.5)

    def test_csv(self, tmp_path):
        curve = roc_curve([0.9, 0.3, 0.5, 0.1], [1, 1, 0, 0])
        path = write_roc_csv([(0, curve), (1, curve)], tmp_path / "roc.csv", mean=mean_roc([curve, curve]))
        frame = pd.read_csv(path, dtype={"curve": str})
        assert list(frame.columns) == ["curve", "fpr", "tpr"]
        assert set(frame["curve"]) == {"0", "1", "mean"}


def _people(n_experts: int, n_nonexperts: int):
    people = [SimpleNamespace(participant_id=f"E{i:02d}", label=Label.EXPERT) for i in range(n_experts)]
    people += [SimpleNamespace(participant_id=f"N{i:02d}", label=Label.NON_EXPERT) for i in range(n_nonexperts)]
    return people


class TestSplits:
    def test_sizes_and_disjointness(self):
        plan = make_split(_people(6, 53), seed=4)
        assert len(plan.train) == 8 and len(plan.val) == 2 and len(plan.test) == 2
        groups = [set(plan.train), set(plan.val), set(plan.test)]
        assert sum(map(len, groups)) == len(set.union(*groups))
        for group in (plan.train, plan.val, plan.test):
            assert sum(pid.startswith("E") for pid in group) == len(group) // 2

    def test_insufficient_experts(self):
        with pytest.raises(ParameterError, match="insufficient experts"):
            make_split(_people(5, 20), seed=0)

    def test_deterministic_and_order_independent(self):
        people = _people(7, 10)
        a = make_split(people, seed=11)
        b = make_split(list(reversed(people)), seed=11)
        assert a == b
        assert any(make_split(people, seed=s).test != a.test for s in range(12, 20))


@pytest.mark.parametrize("size, expected", [(5.0, "initial_only"), (10.0, "initial_only"), (15.0, "all")])
def test_auto_phase_filter(size, expected):
    assert resolve_phase_filter("auto", size) == expected
    assert resolve_phase_filter("all", size) == "all"


def test_single_model_batch(small_cohort, tiny_config):
    result = run_batch(
        small_cohort,
        window_size=5.0,
        n_models=1,
        phase_filter="all",
        base_seed=3,
        model_config=tiny_config,
        train_config=TrainConfig(epochs=2),
    )
    assert result.n_models == 1
    assert result.std_auroc == 0.0 and not result.std_defined
    run = result.per_model[0]
    assert run.seed == 3
    assert 0.0 <= run.auroc <= 1.0
    assert result.mean_auroc == run.auroc
    assert len(run.history.records) <= 2
    assert not set(run.split.test) & set(run.split.train)


def test_batch_metrics_json(small_cohort, tiny_config, tmp_path):
    kwargs = dict(
        window_size=5.0, n_models=2, phase_filter="all", model_config=tiny_config, train_config=TrainConfig(epochs=1)
    )
    first = run_batch(small_cohort, **kwargs).write_metrics(tmp_path / "a.json")
    second = run_batch(small_cohort, **kwargs).write_metrics(tmp_path / "b.json")
    assert first.read_bytes() == second.read_bytes()
    payload = json.loads(first.read_text())
    assert payload["std_defined"] is True
    assert [m["seed"] for m in payload["per_model"]] == [0, 1]


def test_batch_rejects_bad_arguments(small_cohort):
    with pytest.raises(ParameterError):
        run_batch(small_cohort, window_size=5.0, n_models=0)
    with pytest.raises(ParameterError):
        run_batch(small_cohort, window_size=0.0)


def test_untrained_trace_is_flat(small_cohort, tiny_config):
    session = small_cohort[0]
    model = init_model(tiny_config.model_copy(update={"input_length": 1000, "zero_init_head": True}))
    trace = softmax_trace(model, session, 5.0)
    assert len(trace) == len(generate_windows(session.duration, 5.0))
    assert np.all(trace.scores == 0.5)
    assert np.all(np.diff(trace.starts) > 0)


def test_phase_score_comparison():
    points = [
        TracePoint(window_index=i, start=2.5 * i, score=0.9 if i < 4 else 0.2, phase_tag=tag)
        for i, tag in enumerate([PhaseTag.INITIAL_ONLY] * 4 + [PhaseTag.MIXED] * 6)
    ]
    result = compare_phase_scores(SoftmaxTrace(participant_id="E01", window_size=5.0, points=points))
    assert result.u_statistic == 24.0
    assert result.significant


@pytest.mark.slow
def test_separable_cohort_reaches_high_auroc():
    spec = SynthSpec(n_experts=10, n_nonexperts=10, images_per_session=20, seed=0)
    sessions = generate_cohort(BehaviorProfile.expert(), BehaviorProfile.non_expert(), spec)
    result = run_batch(sessions, window_size=5.0, n_models=12)
    assert result.mean_auroc >= 0.90


@pytest.mark.slow
def test_identical_profiles_are_at_chance():
    spec = SynthSpec(n_experts=10, n_nonexperts=10, images_per_session=20, seed=1)
    sessions = generate_cohort(BehaviorProfile.non_expert(), BehaviorProfile.non_expert(), spec)
    result = run_batch(sessions, window_size=5.0, n_models=12)
    assert 0.40 <= result.mean_auroc <= 0.60


@pytest.mark.slow
def test_trace_rises_over_spliced_expert_segment():
    spec = SynthSpec(n_experts=10, n_nonexperts=10, images_per_session=20, seed=2)
    sessions = generate_cohort(BehaviorProfile.expert(), BehaviorProfile.non_expert(), spec)
    features = extract_cohort(sessions, 5.0, initial_only=False)
    plan = make_split(sessions, seed=0)
    train_w = [w for pid in plan.train for w in features[pid]]
    val_w = [w for pid in plan.val for w in features[pid]]
    stats = fit_normalizer(train_w)
    model, _ = train(
        init_model(ModelConfig(input_length=1000)),
        normalize_all(stats, train_w),
        normalize_all(stats, val_w),
        TrainConfig(),
    )

    segment = ProfileSegment(start=60.0, end=120.0, profile=BehaviorProfile.expert())
    session, _ = simulate_session(
        BehaviorProfile.non_expert(), Label.NON_EXPERT, "X01", images_per_session=8, seed=99, overrides=[segment]
    )
    trace = softmax_trace(model, session, 5.0, stats=stats)
    inside = (trace.starts >= 60.0) & (trace.starts + 5.0 <= 120.0)
    assert trace.scores[inside].mean() > trace.scores[~inside].mean()
