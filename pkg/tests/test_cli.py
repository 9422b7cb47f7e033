import json
import logging

import pytest

from gradb import __version__
from gradb.main import main
from gradb.services.serializer import dumps, dumps_collection, save

from conftest import FIXTURES, MOVIE_DOCUMENT, build_movie_graph

MOVIE = str(FIXTURES / "movie.grad")
SCORE = str(FIXTURES / "score.grad")
MAPPING = str(FIXTURES / "etl" / "mapping.json")


@pytest.fixture(autouse=True)
def restore_logging():
    """main() reconfigures the root logger; put it back after each test"""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def run(capsys, *argv):
    code = main([str(arg) for arg in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err.splitlines()


class TestLoad:
    def test_tables_to_stdout(self, capsys):
        code, out, err = run(capsys, "load", MAPPING)
        assert code == 0
        assert out == MOVIE_DOCUMENT
        assert err[-1] == "entities=6 attributes=1 literals=1 edges=7"

    def test_tables_to_file(self, capsys, tmp_path):
        target = tmp_path / "movie.grad"
        code, out, _ = run(capsys, "load", MAPPING, "--out", target, "--strict")
        assert code == 0
        assert out == ""
        assert target.read_text(encoding="utf-8").startswith("grad/1 mode=strict records=15\n")

    def test_property_graph(self, capsys):
        code, out, err = run(capsys, "load", "--property-graph", FIXTURES / "movie.json")
        assert code == 0
        assert out.startswith("grad/1 mode=lax")
        assert err[-1] == "entities=4 attributes=2 literals=2 edges=7"

    def test_missing_mapping(self, capsys, tmp_path):
        code, out, err = run(capsys, "load", tmp_path / "absent.json")
        assert code == 1
        assert out == ""
        assert err[-1].startswith("error\tMissingInput\t")

    def test_bad_table_cell(self, capsys, tmp_path):
        for path in (FIXTURES / "etl").iterdir():
            (tmp_path / path.name).write_text(path.read_text(encoding="utf-8"), encoding="utf-8")
        (tmp_path / "ratings.dat").write_text("IMDB_ID\trating\tratingType\n3884\thigh\tAudience\n", encoding="utf-8")
        code, _, err = run(capsys, "load", tmp_path / "mapping.json")
        assert code == 1
        assert err[-1].startswith("error\tTypeCoercionError\t")

    def test_needs_a_source(self, capsys):
        code, _, err = run(capsys, "load")
        assert code == 2
        assert err[-1].startswith("error\tUsage\t")


class TestValidate:
    def test_clean_graph(self, capsys):
        code, out, err = run(capsys, "validate", MOVIE, FIXTURES / "movies.constraints")
        assert code == 0
        assert out == ""
        assert err[-1] == "errors=0 warnings=0"

    def test_failed_assertion(self, capsys, tmp_path):
        movie = build_movie_graph()
        movie.graph.remove_edge(movie.h["e14"])
        path = tmp_path / "undirected.grad"
        save(movie.graph, path)
        code, out, err = run(capsys, "validate", path, FIXTURES / "movies.constraints")
        assert code == 1
        assert out == "Error\tAssertionFailed\t<MOVIE,{IMDB_ID=3884,RT_ID=Star_Trek}>\tTopRatedDirected\n"
        assert err[-1] == "errors=1 warnings=0"

    def test_report_to_file(self, capsys, tmp_path):
        movie = build_movie_graph()
        movie.graph.add_literal(movie.h["rating"], 9.0, {"Type": "Audience"})
        path = tmp_path / "rated_twice.grad"
        save(movie.graph, path)
        report = tmp_path / "report.tsv"
        code, out, _ = run(capsys, "validate", path, "--out", report)
        assert code == 0
        assert out == ""
        assert report.read_text(encoding="utf-8").startswith("Warning\tDuplicateLiteralContext\t")

    def test_global_edge_labels(self, capsys, tmp_path):
        movie = build_movie_graph()
        sequel = movie.graph.add_entity_node("MOVIE", {"IMDB_ID": 7812})
        movie.graph.add_entity_edge(sequel.handle, movie.h["v5"], "association", "DIRECTS")
        path = tmp_path / "mixed.grad"
        save(movie.graph, path)
        assert run(capsys, "validate", path)[0] == 0
        code, out, _ = run(capsys, "validate", path, "--global-edge-labels")
        assert code == 1
        assert out.startswith("Error\tEdgeLabelClassConflict\tMOVIE\t")

    def test_malformed_document(self, capsys, tmp_path):
        path = tmp_path / "broken.grad"
        path.write_text("grad/1 mode=lax records=1\nEN\t1\tA\n", encoding="utf-8")
        code, _, err = run(capsys, "validate", path)
        assert code == 2
        assert err[-1] == "error\tParseError\tline 2: EN records have 4 fields, found 3"

    def test_too_many_inputs(self, capsys):
        code, _, err = run(capsys, "validate", MOVIE, MOVIE, MOVIE)
        assert code == 2
        assert "at most 2" in err[-1]


class TestQueries:
    def test_match(self, capsys):
        code, out, err = run(capsys, "match", MOVIE, FIXTURES / "top_rated_top_actor.pattern")
        assert code == 0
        header, row = out.splitlines()
        assert header == "m\tr\tv\ta\tm>r\tr>v\tm>a"
        assert row.split("\t")[3] == "<ACTOR,{ActorName=Eric_Bana}>"
        assert err[-1] == "matches=1"

    def test_match_limit(self, capsys):
        code, out, err = run(capsys, "match", MOVIE, FIXTURES / "co_actors.pattern", "--max-matches", 1)
        assert code == 0
        assert len(out.splitlines()) == 2
        assert err[-1] == "matches=1 truncated"

    def test_match_limit_must_be_positive(self, capsys):
        code, _, err = run(capsys, "match", MOVIE, FIXTURES / "co_actors.pattern", "--max-matches", 0)
        assert code == 2
        assert err[-1].startswith("error\tUsage\t")

    def test_invalid_pattern(self, capsys, tmp_path):
        pattern = tmp_path / "orphan.pattern"
        pattern.write_text("nodes\n  v literal\n", encoding="utf-8")
        code, _, err = run(capsys, "match", MOVIE, pattern)
        assert code == 2
        assert err[-1].startswith("error\tInvalidPattern\t")

    def test_select(self, capsys):
        code, out, err = run(capsys, "select", MOVIE, FIXTURES / "co_actors.pattern")
        assert code == 0
        assert out.count("grad/1 ") == 1
        assert err[-1] == "graphs=1"

    def test_select_into_numbered_files(self, capsys, tmp_path, two_movies):
        graph = tmp_path / "two.grad"
        save(two_movies, graph)
        out = tmp_path / "casts.grad"
        code, _, err = run(capsys, "select", graph, FIXTURES / "co_actors.pattern", "--out", out)
        assert code == 0
        assert err[-1] == "graphs=2"
        assert sorted(p.name for p in tmp_path.glob("casts.*.grad")) == ["casts.1.grad", "casts.2.grad"]

    def test_select_merged(self, capsys, tmp_path, two_movies):
        graph = tmp_path / "two.grad"
        save(two_movies, graph)
        code, out, _ = run(capsys, "select", graph, FIXTURES / "co_actors.pattern", "--merge")
        assert code == 0
        assert out.count("grad/1 ") == 1

    def test_compose(self, capsys):
        code, out, err = run(
            capsys, "compose", MOVIE, FIXTURES / "co_actors.pattern", FIXTURES / "co_acts.template"
        )
        assert code == 0
        assert "\tassociation\tCo-Acts\t" in out
        assert err[-1] == "entities=2 attributes=0 literals=0 edges=1"


class TestAlgebra:
    def test_union(self, capsys):
        code, _, err = run(capsys, "union", MOVIE, SCORE)
        assert code == 0
        assert err[-1] == "entities=7 attributes=2 literals=2 edges=9"

    def test_diff(self, capsys):
        code, out, err = run(capsys, "diff", MOVIE, MOVIE)
        assert code == 0
        assert out == "grad/1 mode=lax records=0\n"
        assert err[-1] == "entities=0 attributes=0 literals=0 edges=0"

    def test_join(self, capsys):
        code, out, err = run(capsys, "join", MOVIE, SCORE, FIXTURES / "movie.join")
        assert code == 0
        assert "AN\t8\tScore\n" in out
        assert err[-1] == "graphs=1"

    def test_product(self, capsys, tmp_path, audience_rated, critics_rated):
        pair = tmp_path / "pair.grad"
        pair.write_text(dumps_collection([audience_rated, critics_rated]), encoding="utf-8")
        code, out, err = run(capsys, "product", pair, SCORE)
        assert code == 0
        assert out.count("grad/1 ") == 2
        assert err[-1] == "graphs=2"

    def test_missing_input(self, capsys, tmp_path):
        code, _, err = run(capsys, "union", MOVIE, tmp_path / "absent.grad")
        assert code == 2
        assert err[-1].startswith("error\tMissingInput\tno such file: ")

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = run(capsys, "union", MOVIE, SCORE, "--out", tmp_path / "missing" / "u.grad")
        assert code == 2
        assert err[-1].startswith("error\tSinkError\t")


class TestUnreadableInputs:
    def test_directory_as_graph(self, capsys, tmp_path):
        code, out, err = run(capsys, "validate", tmp_path)
        assert code == 2
        assert out == ""
        assert err[-1].startswith("error\tMissingInput\tnot a regular file: ")

    def test_directory_as_pattern(self, capsys, tmp_path):
        code, _, err = run(capsys, "match", MOVIE, tmp_path)
        assert code == 2
        assert err[-1].startswith("error\tMissingInput\t")

    def test_undecodable_graph(self, capsys, tmp_path):
        path = tmp_path / "latin.grad"
        path.write_bytes(b"grad/1 mode=lax records=1\nEN\t1\tMOVIE\tTitle=s:\xe9t\xe9\n")
        code, out, err = run(capsys, "validate", path)
        assert code == 2
        assert out == ""
        assert err[-1].startswith("error\tSourceError\t")

    def test_undecodable_pattern(self, capsys, tmp_path):
        path = tmp_path / "latin.pattern"
        path.write_bytes(b"nodes\n  m entity = \xe9\n")
        code, _, err = run(capsys, "select", MOVIE, path)
        assert code == 2
        assert err[-1].startswith("error\tSourceError\t")

    def test_undecodable_constraints(self, capsys, tmp_path):
        path = tmp_path / "latin.constraints"
        path.write_bytes(b"multiplicities\n  MOVIE \xe9 ACTOR [1] [*]\n")
        code, _, err = run(capsys, "validate", MOVIE, path)
        assert code == 2
        assert err[-1].startswith("error\tSourceError\t")

    def test_undecodable_mapping_fails_the_load(self, capsys, tmp_path):
        path = tmp_path / "mapping.json"
        path.write_bytes(b'{"tables": [\xff]}')
        code, out, err = run(capsys, "load", path)
        assert code == 1
        assert out == ""
        assert err[-1].startswith("error\tMappingError\tcannot read mapping ")


class TestInspect:
    def test_stats(self, capsys):
        code, out, _ = run(capsys, "stats", MOVIE)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == (
            "entities=6 attributes=1 literals=1 entity_edges=5 attribute_edges=1 literal_edges=1 classes=5"
        )
        assert lines[1] == "ACTOR\t2"

    def test_stats_folds_a_collection(self, capsys, tmp_path, audience_rated, critics_rated):
        pair = tmp_path / "pair.grad"
        pair.write_text(dumps(audience_rated) + dumps(critics_rated), encoding="utf-8")
        code, out, _ = run(capsys, "stats", pair)
        assert code == 0
        assert out.splitlines()[1] == "MOVIE\t2"

    def test_export(self, capsys):
        code, out, _ = run(capsys, "export", MOVIE)
        assert code == 0
        document = json.loads(out)
        assert [node["id"] for node in document["nodes"]] == ["n1", "n2", "n3", "n4", "n5", "n6"]


class TestParser:
    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert capsys.readouterr().out.strip() == f"gradb {__version__}"

    def test_unknown_verb(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_wrong_arity(self, capsys):
        assert main(["compose", MOVIE]) == 2
