import json
import subprocess
import sys
from pathlib import Path

import pytest

from weavent import io as iomod
from weavent.cli import main
from weavent.duality import dom_of_es, es_isomorphic, poset_isomorphic, unfold
from weavent.fixtures import e_run, e_ccs, nontransitive_bdomain, running_grammar
from weavent.io import SchemaError

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"


def run_cli(*argv, capsys=None):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestJson:
    def test_es_roundtrip(self, tmp_path):
        path = tmp_path / "es.json"
        iomod.dump_json(iomod.es_to_json(e_run()), str(path))
        assert iomod.load_structure(str(path), "es") == e_run()

    def test_consistency_kind_roundtrip(self, tmp_path):
        from weavent.es import EventStructure
        es = EventStructure.with_consistency(
            "xyz", [("x", "y"), ("y", "z"), ("x", "z")],
            enabling=[((), "x"), ((), "y"), ((), "z")])
        path = tmp_path / "es.json"
        iomod.dump_json(iomod.es_to_json(es), str(path))
        assert iomod.load_structure(str(path), "es") == es

    def test_domain_roundtrip(self, tmp_path):
        dom = nontransitive_bdomain()
        path = tmp_path / "d.json"
        iomod.dump_json(iomod.domain_to_json(dom), str(path))
        back = iomod.load_structure(str(path), "domain")
        assert back.elements == dom.elements
        assert back.covers() == dom.covers()
        assert back.kind == dom.kind

    def test_grammar_roundtrip(self, tmp_path):
        g = running_grammar()
        path = tmp_path / "g.json"
        iomod.dump_json(iomod.grammar_to_json(g), str(path))
        back = iomod.load_structure(str(path), "grammar")
        assert [r.name for r in back.rules] == [r.name for r in g.rules]
        assert back.start.same(g.start)

    def test_epes_roundtrip(self, tmp_path):
        p = unfold(e_run())
        path = tmp_path / "p.json"
        iomod.dump_json(iomod.epes_to_json(p), str(path))
        back = iomod.load_structure(str(path), "epes")
        assert back.base == p.base
        assert back.equiv == p.equiv

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"events": ["a"], "enabling": [], "extra": 1}))
        with pytest.raises(SchemaError):
            iomod.load_structure(str(path), "es")

    def test_both_conflict_kinds_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"events": ["a"], "conflict": [],
                                    "consistent": [["a"]]}))
        with pytest.raises(SchemaError):
            iomod.load_structure(str(path), "es")

    def test_cyclic_covers_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"elements": ["a", "b"],
                                    "covers": [["a", "b"], ["b", "a"]]}))
        with pytest.raises(SchemaError):
            iomod.load_structure(str(path), "domain")

    def test_fixture_files_match_constructors(self):
        assert iomod.load_structure(str(FIXTURES / "e_run.es.json"), "es") == e_run()
        dom = iomod.load_structure(str(FIXTURES / "run.domain.json"), "domain")
        assert poset_isomorphic(dom, dom_of_es(e_run())) is not None
        g = iomod.load_structure(str(FIXTURES / "fusion.grammar.json"), "grammar")
        assert [r.name for r in g.rules] == ["p_a", "p_b", "p_c"]


class TestCli:
    def test_roundtrip_e_run(self, capsys):
        code, out, _ = run_cli("roundtrip", "--es", str(FIXTURES / "e_run.es.json"),
                               capsys=capsys)
        assert code == 0
        report = json.loads(out)
        assert report["results"]["dom_preserved"] is True

    def test_derive_running(self, capsys):
        code, out, _ = run_cli("derive", "--grammar",
                               str(FIXTURES / "fusion.grammar.json"),
                               "--depth", "3", capsys=capsys)
        assert code == 0
        report = json.loads(out)
        assert report["results"]["trace_classes"] == 7
        assert report["results"]["weak_prime"] is True

    def test_derive_fusion_safe(self, capsys):
        code, out, _ = run_cli("derive", "--grammar",
                               str(FIXTURES / "fusion.grammar.json"),
                               "--depth", "3", "--fusion-safe", capsys=capsys)
        assert code == 0
        report = json.loads(out)
        assert report["results"]["trace_classes"] == 5
        assert report["results"]["prime"] is True

    def test_malformed_input_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"elements": ["a", "b"],
                                   "covers": [["a", "b"], ["b", "a"]]}))
        code, out, err = run_cli("check", "--domain", str(bad), capsys=capsys)
        assert code == 2
        assert "error" in json.loads(err)

    def test_missing_file_exits_2(self, capsys):
        code, _, err = run_cli("check", "--es", "no-such-file.json", capsys=capsys)
        assert code == 2

    def test_connect_splits(self, tmp_path, capsys):
        out_path = tmp_path / "out.json"
        code, out, _ = run_cli("connect", "--es",
                               str(FIXTURES / "e_prime_conflict.es.json"),
                               "--out", str(out_path), capsys=capsys)
        assert code == 0
        back = iomod.load_structure(str(out_path), "es")
        assert len(back.events) == 4

    def test_convert_and_back(self, tmp_path, capsys):
        dom_path = tmp_path / "dom.json"
        code, _, _ = run_cli("convert", "--es", str(FIXTURES / "e_run.es.json"),
                             "--to", "domain", "--out", str(dom_path), capsys=capsys)
        assert code == 0
        code, out, _ = run_cli("convert", "--domain", str(dom_path), "--to", "es",
                               capsys=capsys)
        assert code == 0
        es = iomod.parse_es(json.loads(out)["results"]["structure"])
        assert es_isomorphic(es, e_run()) is not None

    def test_axioms_m3(self, capsys):
        code, out, _ = run_cli("axioms", "--domain", str(FIXTURES / "m3.domain.json"),
                               capsys=capsys)
        assert code == 0
        report = json.loads(out)
        assert report["results"]["R"] is False
        assert report["results"]["weak_prime_algebraic"] is False

    def test_async_weak(self, capsys):
        code, out, _ = run_cli("async", "--async", str(FIXTURES / "run.async.json"),
                               "--weak", capsys=capsys)
        assert code == 0
        report = json.loads(out)
        assert report["results"]["weak_prime"] is True
        assert report["results"]["cube_down"] is False
        assert report["results"]["path_classes"] == 7

    def test_async_full_fails_on_run_domain(self, capsys):
        code, out, _ = run_cli("async", "--async", str(FIXTURES / "run.async.json"),
                               capsys=capsys)
        assert code == 1

    def test_synth_report(self, capsys):
        code, out, _ = run_cli("synth", "--es", str(FIXTURES / "e_run.es.json"),
                               capsys=capsys)
        assert code == 0
        report = json.loads(out)
        assert report["results"]["rules"] == ["a", "b", "c"]
        assert report["results"]["start_nodes"] == 7
        assert report["results"]["exhaustive_depth"] == 3

    def test_emit_dot_deterministic(self, tmp_path, capsys):
        p1, p2 = tmp_path / "a.dot", tmp_path / "b.dot"
        for p in (p1, p2):
            code, _, _ = run_cli("emit", "--domain",
                                 str(FIXTURES / "run.domain.json"),
                                 "--out", str(p), capsys=capsys)
            assert code == 0
        assert p1.read_bytes() == p2.read_bytes()
        text = p1.read_text()
        assert text.count("->") == 9
        assert text.count(";") >= 16

    def test_emit_grammar_start(self, tmp_path, capsys):
        out = tmp_path / "g.dot"
        code, _, _ = run_cli("emit", "--grammar",
                             str(FIXTURES / "fusion.grammar.json"),
                             "--out", str(out), capsys=capsys)
        assert code == 0
        text = out.read_text()
        assert text.count("->") == 4  # four loops

    def test_reports_are_deterministic(self, capsys):
        outs = set()
        for _ in range(2):
            code, out, _ = run_cli("check", "--es", str(FIXTURES / "e_run.es.json"),
                                   capsys=capsys)
            assert code == 0
            outs.add(out)
        assert len(outs) == 1

    def test_script_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "weavent.cli", "check", "--es",
             str(FIXTURES / "e_run.es.json")],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["results"]["live"] is True
