"""
Shared pytest fixtures: the knife-cutting and Helen/Maya talk graphs, a
frame map, and small synthetic corpora.
"""

import random

import pytest

from amr_rematch.amr_core import parse_penman
from amr_rematch.motifs import FrameMap
from amr_rematch.synthetic import random_graph, synthetic_corpus

CUT_TEXT = "(c / cut-01 :polarity - :ARG0 (h / he) :ARG1 (a / apple) :inst (k / knife))"

# "Helen and Maya are not talking about politics"
TALK_TEXT = """
(t / talk-01
   :polarity -
   :ARG0 (p / person
            :name (n / name :op1 "Helen"))
   :ARG2 (p2 / person
             :name (n2 / name :op1 "Maya"))
   :ARG1 (p3 / politics))
"""

# "Helen talks to Maya about politics"
TALK_POSITIVE_TEXT = """
(t / talk-01
   :ARG0 (p / person
            :name (n / name :op1 "Helen"))
   :ARG2 (p2 / person
             :name (n2 / name :op1 "Maya"))
   :ARG1 (p3 / politics))
"""


@pytest.fixture
def cut_graph():
    return parse_penman(CUT_TEXT)


@pytest.fixture
def talk_graph():
    return parse_penman(TALK_TEXT)


@pytest.fixture
def talk_positive_graph():
    return parse_penman(TALK_POSITIVE_TEXT)


@pytest.fixture
def talk_frames():
    return FrameMap({"talk-01": "speak"})


@pytest.fixture
def small_graphs():
    rng = random.Random(11)
    return [random_graph(rng, rng.randint(3, 24)) for _ in range(60)]


@pytest.fixture
def small_corpus():
    return synthetic_corpus(count=40, seed=5, min_size=6, max_size=40)


@pytest.fixture
def corpus_file(tmp_path):
    path = tmp_path / "pair.amr"
    path.write_text(
        "# ::id cut\n# ::snt He did not cut the apple with a knife\n" + CUT_TEXT + "\n\n"
        "# ::id talk\n" + TALK_TEXT.strip() + "\n",
        encoding="utf-8",
    )
    return str(path)
