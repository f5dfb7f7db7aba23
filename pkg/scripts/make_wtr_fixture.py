#!/usr/bin/env python3
"""Regenerate the bundled five-record evaluation fixture.

The fixture exercises every annotation path: all three stance outcomes, a
tie with an explicit tie-break, not-sure votes, and author labels covering
1A/1B/1D/2A/2B. T1 evidence texts are produced by running this package's own
extraction and scoring (baseline backend), so they match scored passages
exactly; votes are fixed per evidence rank.
"""

from __future__ import annotations

from pathlib import Path

from prove.backends import BaselineBackend
from prove.core import Reference, Triple, TripleComponent
from prove.evaluation import ComponentRecord, T1Annotation, VoteSet, WtrRecord, save_wtr
from prove.pipeline import PipelineConfig, verify_pair

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "wtr_small.jsonl"

WORKERS = ("w01", "w02", "w03", "w04", "w05")
TIMES = (41.0, 38.5, 52.0, 47.5, 35.0)

PAGES = [
    {
        "claim_id": "c1",
        "subject": ("Q101", "Anna Vogel", ("A. Vogel",), "German artist"),
        "predicate": ("P106", "occupation", ("profession",), "line of work"),
        "object": ("Q102", "sculptor", (), "maker of sculptures"),
        "datatype": "entity",
        "url": "https://artpedia.example/anna-vogel",
        "netloc": "artpedia.example",
        "netloc_group": "artpedia.example",
        "html": """
            <html><head><title>Anna Vogel</title></head><body>
            <nav>Artists | Exhibitions</nav>
            <p>Anna Vogel is a sculptor from Dresden.</p>
            <p>Her occupation took her across Europe.</p>
            <p>Critics praised her bronze figures.</p>
            </body></html>
        """,
        # Ranked evidence votes, most relevant first.
        "t1_votes": [(0, 0, 0, 0, 2), (0, 0, 2, 0, 0), (2, 2, 2, 0, 2),
                     (2, 2, 2, 2, 2), (2, 2, 3, 2, 2)],
        "t2": VoteSet(votes=(0, 0, 0, 2, 0), worker_ids=WORKERS, times=TIMES),
        "author_label": "1A",
    },
    {
        "claim_id": "c2",
        "subject": ("Q201", "Port Ellen harbour", (), "harbour in Scotland"),
        "predicate": ("P571", "inception", ("founding date",), "time of founding"),
        "object": ("1712", "1712", (), None),
        "datatype": "datetime",
        "url": "https://gazetteer.example/port-ellen",
        "netloc": "gazetteer.example",
        "netloc_group": "gazetteer.example",
        "html": """
            <html><body>
            <table><tr><th>Port Ellen harbour</th><td>inception 1712</td></tr></table>
            <p>The quay walls were rebuilt twice.</p>
            </body></html>
        """,
        "t1_votes": [(0, 0, 2, 0, 0), (0, 2, 0, 0, 3), (2, 2, 0, 2, 2),
                     (2, 2, 2, 2, 2)],
        "t2": VoteSet(votes=(0, 0, 2, 0, 0), worker_ids=WORKERS, times=TIMES),
        "author_label": "1B",
    },
    {
        "claim_id": "c3",
        "subject": ("Q301", "Bridgetown Bridge", (), "road bridge"),
        "predicate": ("P2043", "length", (), "measured dimension"),
        "object": ("304", "304 metres", ("304 m",), None),
        "datatype": "quantity",
        "url": "https://structures.example/bridgetown",
        "netloc": "structures.example",
        "netloc_group": "structures.example",
        "html": """
            <html><body>
            <p>Bridgetown Bridge spans the river gorge.</p>
            <p>Crossing it takes about four minutes on foot, which matches its
            length of 304 metres.</p>
            <p>The deck was resurfaced in 2004.</p>
            </body></html>
        """,
        # Evidence-set votes tie SUPP vs NEI; the tie-break resolves to SUPP.
        "t1_votes": [(0, 0, 2, 2, 0), (0, 2, 2, 0, 2), (2, 2, 2, 2, 0),
                     (2, 2, 2, 2, 2), (0, 2, 2, 2, 2)],
        "t2": VoteSet(votes=(0, 0, 2, 2, 3), worker_ids=WORKERS, times=TIMES,
                      tie_break=0),
        "author_label": "1D",
    },
    {
        "claim_id": "c4",
        "subject": ("Q401", "Robert Brunton", (), "Scottish engineer"),
        "predicate": ("P569", "date of birth", ("born",), "birth date"),
        "object": ("1796-03-23", "1796-03-23", (), None),
        "datatype": "datetime",
        "url": "https://records.example/brunton",
        "netloc": "records.example",
        "netloc_group": "records.example",
        "html": """
            <html><body>
            <p>Robert Brunton, engineer, was born on the 10th of February 1796,
            not in March as some registers claim.</p>
            <p>His date of birth appears in the parish ledger.</p>
            <p>He trained in Glasgow.</p>
            </body></html>
        """,
        "t1_votes": [(1, 1, 1, 2, 1), (1, 1, 2, 1, 1), (2, 2, 1, 2, 2),
                     (2, 2, 2, 2, 2), (2, 3, 2, 2, 2)],
        "t2": VoteSet(votes=(1, 1, 1, 2, 0), worker_ids=WORKERS, times=TIMES),
        "author_label": "2A",
    },
    {
        "claim_id": "c5",
        "subject": ("Q501", "Blue Museum", (), "art museum"),
        "predicate": ("P112", "founder", ("founded by",), "founding person"),
        "object": ("Q502", "Maria Keller", (), "art patron"),
        "datatype": "entity",
        "url": "https://museums.example/blue",
        "netloc": "museums.example",
        "netloc_group": "museums.example",
        "html": """
            <html><body>
            <p>The Blue Museum sits by the old harbour.</p>
            <p>Its collection focuses on maritime painting.</p>
            <p>Opening hours vary by season.</p>
            </body></html>
        """,
        "t1_votes": [(2, 2, 2, 2, 0), (2, 2, 2, 2, 2), (2, 3, 2, 2, 2),
                     (2, 2, 2, 2, 2), (2, 2, 2, 2, 2)],
        "t2": VoteSet(votes=(2, 2, 2, 3, 2), worker_ids=WORKERS, times=TIMES),
        "author_label": "2B",
    },
]


def build_record(page: dict) -> WtrRecord:
    subject = TripleComponent(
        id=page["subject"][0], main_label=page["subject"][1],
        aliases=page["subject"][2], description=page["subject"][3],
    )
    predicate = TripleComponent(
        id=page["predicate"][0], main_label=page["predicate"][1],
        aliases=page["predicate"][2], description=page["predicate"][3],
    )
    object_ = TripleComponent(
        id=page["object"][0], main_label=page["object"][1],
        aliases=page["object"][2], description=page["object"][3],
    )
    triple = Triple(
        id=page["claim_id"], subject=subject, predicate=predicate,
        object=object_, object_datatype=page["datatype"],
    )
    reference = Reference(
        id=f"ref-{page['claim_id']}", source_kind="url",
        source_value=page["url"], final_url=page["url"],
        html=page["html"], netloc=page["netloc"],
    )
    result = verify_pair(
        triple, reference, BaselineBackend(),
        PipelineConfig(aggregators=("weighted_sum",)),
    )
    t1 = tuple(
        T1Annotation(
            votes=tuple(votes),
            worker_ids=WORKERS,
            times=TIMES,
            evidence=sp.passage.text,
        )
        for sp, votes in zip(result.evidence, page["t1_votes"])
    )

    def component_record(c: TripleComponent) -> ComponentRecord:
        return ComponentRecord(
            id=c.id, label=c.main_label, aliases=c.aliases, description=c.description
        )

    return WtrRecord(
        reference_id=f"ref-{page['claim_id']}",
        reference_property_id="P854",
        reference_datatype="url",
        url=page["url"],
        netloc=page["netloc"],
        netloc_group=page["netloc_group"],
        final_url=page["url"],
        html=page["html"],
        claim_id=page["claim_id"],
        rank="normal",
        datatype=page["datatype"],
        subject=component_record(subject),
        predicate=component_record(predicate),
        object=component_record(object_),
        t1=t1,
        t2=page["t2"],
        author_label=page["author_label"],
    )


def main() -> None:
    records = [build_record(page) for page in PAGES]
    save_wtr(records, OUT)
    for record in records:
        print(f"{record.claim_id}: {len(record.t1)} annotated evidence, "
              f"author label {record.author_label}")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
