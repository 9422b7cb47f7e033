import io

import pytest

from gradb.core.exceptions import ParseError, SinkError, SourceError, UnsupportedVersion
from gradb.models.graph import GradGraph
from gradb.services.serializer import dumps, dumps_collection, load, load_collection, loads, loads_collection, save

from conftest import MOVIE_DOCUMENT, build_movie_graph
from generators import graph_signature, random_graph


class TestDumps:
    def test_movie_document(self, movie_graph):
        assert dumps(movie_graph) == MOVIE_DOCUMENT

    def test_empty_graph(self):
        assert dumps(GradGraph(strict=True)) == "grad/1 mode=strict records=0\n"

    def test_independent_of_insertion_order(self, movie_graph):
        rebuilt = loads(MOVIE_DOCUMENT)
        assert dumps(rebuilt) == dumps(movie_graph)

    def test_collection(self, audience_rated, critics_rated):
        text = dumps_collection([audience_rated, critics_rated])
        assert text.count("grad/1 mode=lax") == 2
        graphs = loads_collection(text)
        assert [dumps(g) for g in graphs] == [dumps(audience_rated), dumps(critics_rated)]


class TestLoads:
    def test_movie_document(self):
        g = loads(MOVIE_DOCUMENT)
        assert g.counts() == build_movie_graph().graph.counts()
        assert not g.strict

    def test_strict_header(self):
        assert loads("grad/1 mode=strict records=0\n").strict

    def test_strict_document_rejects_duplicates(self):
        text = (
            "grad/1 mode=strict records=2\n"
            "EN\t1\tMOVIE\tIMDB_ID=i:1\n"
            "EN\t2\tMOVIE\tIMDB_ID=f:1.0\n"
        )
        with pytest.raises(ParseError, match="DuplicateIdentity"):
            loads(text)
        assert len(loads(text.replace("strict", "lax")).entity_nodes) == 2

    def test_unsupported_version(self):
        with pytest.raises(UnsupportedVersion):
            loads("grad/2 mode=lax records=0\n")

    @pytest.mark.parametrize(
        "text, line",
        [
            ("grad/1 records=0\n", 1),
            ("grad/1 mode=lax records=2\nEN\t1\tMOVIE\tIMDB_ID=i:1\n", 1),
            ("grad/1 mode=lax records=1\nEN\t1\tMOVIE\tIMDB_ID=x:1\n", 2),
            ("grad/1 mode=lax records=1\nXX\t1\n", 2),
            ("grad/1 mode=lax records=1\nEN\t1\tMOVIE\n", 2),
            ("grad/1 mode=lax records=2\nEN\t1\tA\tk=i:1\nEN\t1\tB\tk=i:2\n", 3),
            ("grad/1 mode=lax records=2\nEN\t1\tA\tk=i:1\nEE\t2\t1\t9\tassociation\tX\t-\n", 3),
            ("grad/1 mode=lax records=2\nEN\t1\tA\tk=i:1\nEE\t2\t1\t1\tfriendship\tX\t-\n", 3),
            ("grad/1 mode=lax records=1\nAN\t1\tRating\n", 2),
        ],
    )
    def test_malformed(self, text, line):
        with pytest.raises(ParseError) as error:
            loads(text)
        assert error.value.line == line

    def test_dangling_reference_is_named(self):
        text = "grad/1 mode=lax records=2\nEN\t1\tA\tk=i:1\nEE\t2\t1\t9\tassociation\tX\t-\n"
        with pytest.raises(ParseError, match="DanglingReference"):
            loads(text)

    def test_error_lines_count_from_the_collection_start(self):
        text = "grad/1 mode=lax records=0\ngrad/1 mode=lax records=1\nZZ\t1\n"
        with pytest.raises(ParseError) as error:
            loads_collection(text)
        assert error.value.line == 3

    def test_single_document_expected(self):
        with pytest.raises(ParseError):
            loads("grad/1 mode=lax records=0\n" * 2)
        with pytest.raises(ParseError):
            loads("")


class TestFiles:
    def test_save_and_load(self, movie_graph, tmp_path):
        path = tmp_path / "movie.grad"
        written = save(movie_graph, path)
        assert written == len(MOVIE_DOCUMENT.encode("utf-8"))
        assert dumps(load(path)) == MOVIE_DOCUMENT

    def test_streams(self, movie_graph):
        text_sink = io.StringIO()
        save(movie_graph, text_sink)
        binary_sink = io.BytesIO()
        save(movie_graph, binary_sink)
        assert binary_sink.getvalue().decode("utf-8") == text_sink.getvalue() == MOVIE_DOCUMENT
        assert dumps(load(io.StringIO(MOVIE_DOCUMENT))) == MOVIE_DOCUMENT

    def test_unwritable_sink(self, movie_graph, tmp_path):
        with pytest.raises(SinkError):
            save(movie_graph, tmp_path / "missing" / "movie.grad")

    def test_collection_file(self, audience_rated, critics_rated, tmp_path):
        path = tmp_path / "ratings.grad"
        path.write_text(dumps_collection([audience_rated, critics_rated]), encoding="utf-8")
        assert len(load_collection(path)) == 2

    def test_unreadable_sources(self, tmp_path):
        with pytest.raises(SourceError):
            load(tmp_path)
        with pytest.raises(SourceError):
            load(io.BytesIO(b"\xff\xfegrad/1 mode=lax records=0\n"))
        with pytest.raises(SourceError, match="cannot read"):
            load(tmp_path / "absent.grad")


@pytest.mark.parametrize("seed", range(100))
def test_random_graphs_survive_a_reload(seed):
    g = random_graph(seed)
    assert graph_signature(loads(dumps(g))) == graph_signature(g)
