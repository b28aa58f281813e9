import time

from gaze_expertise.core.runnables import RunnableConfig, RunnableLambda, RunnableSequence
from gaze_expertise.features.extract import WindowFeatureExtractor
from gaze_expertise.parsers.manifest import SessionParser, write_session
from gaze_expertise.windowing.spans import generate_windows


def test_pipe_flattens_into_one_sequence():
    inc = RunnableLambda(lambda x: x + 1)
    double = RunnableLambda(lambda x: x * 2)
    pipeline = inc | double | inc
    assert isinstance(pipeline, RunnableSequence)
    assert len(pipeline.steps) == 3
    assert pipeline.invoke(3) == 9


def test_batch_keeps_input_order_when_parallel():
    slow_first = RunnableLambda(lambda x: (time.sleep(0.02 * (5 - x)), x)[1])
    assert slow_first.batch(list(range(5)), RunnableConfig(max_concurrency=4)) == [0, 1, 2, 3, 4]


def test_parser_to_features_pipeline(tmp_path, small_cohort):
    session = small_cohort[0]
    manifest = write_session(session, tmp_path)
    pipeline = SessionParser() | WindowFeatureExtractor(5.0)
    windows = pipeline.invoke(manifest)
    assert len(windows) == len(generate_windows(session.duration, 5.0))
    assert {w.participant_id for w in windows} == {session.participant_id}
