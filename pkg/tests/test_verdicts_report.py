import json

import numpy as np
import pytest

from driftcert.criteria import classify
from driftcert.errors import ContradictoryVerdicts
from driftcert.report import ClassificationReport
from driftcert.verdicts import Caveat, Conclusion, Verdict, VerdictClass, compatible, strongest

V = VerdictClass
H_ = Caveat.HORIZON
A_ = Caveat.ANALYTIC


def cert(cls, name, caveat=H_):
    return Verdict(cls, name, {"N": 1}, caveat)


def test_certified_verdict_needs_witnesses_and_caveat():
    with pytest.raises(ValueError):
        Verdict(V.TRANSIENT, "x", {}, H_)
    with pytest.raises(ValueError):
        Verdict(V.TRANSIENT, "x", {"N": 1}, None)
    assert not Verdict.inconclusive("x", "why").certified


def test_witnesses_become_plain_values():
    v = Verdict(V.RECURRENT, "x", {"N": np.int64(3), "eps": np.float64(0.5), "arr": np.arange(2)}, H_)
    assert json.dumps(v.witnesses) == '{"N": 3, "eps": 0.5, "arr": [0, 1]}'


def test_compatibility_table():
    assert compatible(V.RECURRENT, V.NULL_RECURRENT)
    assert compatible(V.NON_ERGODIC, V.TRANSIENT)
    assert compatible(V.INCONCLUSIVE, V.POSITIVE_RECURRENT)
    assert not compatible(V.RECURRENT, V.TRANSIENT)
    assert not compatible(V.NON_ERGODIC, V.POSITIVE_RECURRENT)


def test_strongest_prefers_analytic():
    c = strongest([cert(V.TRANSIENT, "a"), cert(V.TRANSIENT, "b", A_)])
    assert (c.cls, c.criterion, c.caveat) == (V.TRANSIENT, "b", A_)


def test_strongest_derives_null_recurrence():
    c = strongest([cert(V.RECURRENT, "rec"), Verdict.inconclusive("z", "no"), cert(V.NON_ERGODIC, "ne", A_)])
    assert c.cls is V.NULL_RECURRENT
    assert c.criterion == "derived:ne+rec" and c.caveat is H_


def test_strongest_all_inconclusive():
    c = strongest([Verdict.inconclusive("a", "x")])
    assert c == Conclusion(V.INCONCLUSIVE, "none", None, ())


def test_strongest_contradiction():
    with pytest.raises(ContradictoryVerdicts):
        strongest([cert(V.RECURRENT, "a"), cert(V.TRANSIENT, "b")])


def test_verdict_roundtrip():
    v = Verdict(V.INCONCLUSIVE, "lamperti(theta=1.5)", {"k": 2}, None, "σ not bounded away from zero", False)
    assert Verdict.from_dict(json.loads(json.dumps(v.to_dict()))) == v


def test_report_roundtrip_and_key_order(sit_still1):
    r = classify(sit_still1, 1000).with_simulation({"returned": 3, "note": "x"})
    text = r.to_json()
    assert list(json.loads(text)) == ["format", "version", "spec", "profile", "verdicts", "conclusion", "simulation"]
    back = ClassificationReport.from_json(text)
    assert back == r and back.to_json() == text
    assert text.endswith("}\n")


def test_report_verdict_lookup(sit_still1):
    r = classify(sit_still1, 1000)
    assert r.verdict("null_recurrence").cls is V.NULL_RECURRENT
    with pytest.raises(KeyError):
        r.verdict("nope")


def test_report_consistency_detects_tampering(sit_still1):
    r = classify(sit_still1, 1000)
    d = r.to_dict()
    d["conclusion"]["class"] = "PositiveRecurrent"
    with pytest.raises(ContradictoryVerdicts):
        ClassificationReport.from_dict(d).check_consistency()


def test_timings_only_on_request(sit_still1):
    assert classify(sit_still1, 1000).timings is None
    t = classify(sit_still1, 1000, timings=True).timings
    assert t and all(v >= 0 for v in t.values())


def test_report_deterministic(powerlaw075):
    assert classify(powerlaw075, 5000).to_json() == classify(powerlaw075, 5000).to_json()
