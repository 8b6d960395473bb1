"""Bundled demo data: tiny corpora plus machine and hand-edited plan examples.

The two corpora are engineered so the stub backend's lexical choices are
easy to verify by hand. The plan fixtures are question-only plans with their
summaries, stored in decoder emission form so they parse with the standard
codec.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from pathlib import Path

from plansum.blueprint import (
    Blueprint,
    Mode,
    QAPair,
    Summary,
    segment_sentences,
    serialize_output,
)
from plansum.retrieval import Corpus, ingest_local

CORPORA: dict[str, list[dict[str, str]]] = {
    "sky": [
        {
            "url": "https://example.test/sky",
            "title": "Atmospheric optics.",
            "body": (
                "The sky is blue because air molecules scatter blue light from the sun. "
                "Rayleigh scattering is stronger at short wavelengths. "
                "Astronauts in orbit observe darkness overhead."
            ),
        },
        {
            "url": "https://example.test/sunset",
            "title": "Dusk shades.",
            "body": (
                "The evening sky turns orange at sunset. "
                "Dust particles deepen red tones near the horizon."
            ),
        },
    ],
    "titanic": [
        {
            "url": "https://example.test/titanic",
            "title": "Ocean liners.",
            "body": (
                "The Titanic was a British passenger liner famous for its size. "
                "The ship became known worldwide after it hit an iceberg and sank in 1912. "
                "Lookouts spotted the iceberg too late to steer away."
            ),
        },
        {
            "url": "https://example.test/wreck",
            "title": "Deep wrecks.",
            "body": (
                "The famous wreck lies on the seabed at a depth of roughly 3,800 meters. "
                "Explorers filmed the wreck decades later."
            ),
        },
    ],
}


@dataclass(frozen=True)
class PlanFixture:
    """A question-only plan and its summary for one query."""

    query: str
    questions: tuple[str, ...]
    summary_text: str

    def blueprint(self) -> Blueprint:
        return Blueprint(tuple(QAPair(question=q) for q in self.questions), Mode.QUESTION_ONLY)

    def summary(self) -> Summary:
        return Summary(tuple(segment_sentences(self.summary_text)))

    def emission(self) -> str:
        return serialize_output(self.blueprint(), self.summary())


PLANS: dict[str, PlanFixture] = {
    "statue_of_liberty_machine": PlanFixture(
        query="Why did France give the US the Statue of Liberty?",
        questions=(
            "Who proposed that a statue be built as a gift from France to the United States"
            " to commemorate the friendship between France and the United States?",
            "In what year was the Statue of Liberty designed?",
            "Who designed the Statue of Liberty?",
            "Along with freedom and democracy, what did Laboulaye want the Statue of Liberty"
            " to represent?",
            "To whom was the Statue of Liberty presented?",
            "In what city was the Statue of Liberty presented to the U.S. ambassador?",
            "Gustave Eiffel helped build what for the Statue of Liberty?",
        ),
        summary_text=(
            "In 1865, French political thinker and abolitionist Édouard de Laboulaye proposed"
            " that a statue be built as a gift from France to the United States to commemorate"
            " the friendship between France and the United States and to commemorate the 100th"
            " anniversary of U.S. independence. Designed by sculptor Auguste Bartholdi, the"
            " statue was meant to symbolize the American welcome of immigrants and refugee"
            " seekers. It was presented to the U.S. ambassador Levi Morton in Paris on July 4,"
            " 1881, by French Marshal Nicolas Luckner as a commemoration of the friendship"
            " between France and the United States. Gustave Eiffel helped build the pedestal"
            " for the Statue of Liberty."
        ),
    ),
    "statue_of_liberty_edited": PlanFixture(
        query="Why did France give the US the Statue of Liberty?",
        questions=(
            "Who proposed that a statue be built as a gift from France to the United States"
            " to commemorate the friendship between France and the United States?",
            "In what year was the Statue of Liberty designed?",
            "Who designed the Statue of Liberty?",
            "Along with freedom and democracy, what did Laboulaye want the Statue of Liberty"
            " to represent?",
            "To whom was the Statue of Liberty presented?",
            "In what city was the Statue of Liberty presented to the U.S. ambassador?",
            "How was the Statue of Liberty transported to New York City?",
        ),
        summary_text=(
            "In 1865, French political thinker and abolitionist Édouard de Laboulaye proposed"
            " that a statue be built as a gift from France to the United States to commemorate"
            " the friendship between France and the United States and to commemorate the 100th"
            " anniversary of the United States' independence. Designed by sculptor Auguste"
            " Bartholdi, the statue was meant to symbolize the American welcome of immigrants"
            " and refugee seekers. It was presented to the U.S. ambassador Levi Morton in Paris"
            " on July 4, 1881, and later transported to New York City where it was"
            " reconstructed."
        ),
    ),
    "cersei_lannister_machine": PlanFixture(
        query="Who plays Queen Lannister in Game of Thrones?",
        questions=(
            "Who is the actress who played Cersei Lannister?",
            "What is Cersei Lannister's role in Game of Thrones?",
            "What is the name of the book series in which Cersei Lannister appears?",
            "Who wrote 'A Song of Ice and Fire'?",
            "What is Game of Thrones based on?",
            "When did Game of Thrones first air?",
            "What is one of the wealthiest and most powerful families in Westeros?",
            "In what year did Cersei Lannister first appear in the books?",
        ),
        summary_text=(
            "Cersei Lannister is a fictional character in the A Song of Ice and Fire series of"
            " epic fantasy novels by American author George R.R. Martin, and its television"
            " adaptation Game of Thrones, where she is portrayed by Bermudian-English actress"
            " Lena Headey. Introduced in 1996's A Game of Thrones, Cersei is a member of House"
            " Lannister, one of the wealthiest and most powerful families on the continent of"
            " Westeros. She subsequently appears in A Clash of Kings (1998) and A Storm of"
            " Swords (2000), and becomes a prominent point of view character beginning with A"
            " Feast for Crows (2005)."
        ),
    ),
    "cersei_lannister_edited": PlanFixture(
        query="Who plays Queen Lannister in Game of Thrones?",
        questions=(
            "Who is the actress who played Cersei Lannister?",
            "What is Cersei Lannister's role in Game of Thrones?",
            "Has the actress received any awards?",
            "Is the actress famous?",
        ),
        summary_text=(
            "Cersei Lannister is a fictional character in the A Song of Ice and Fire series of"
            " epic fantasy novels by American author George R.R. Martin, and its television"
            " adaptation Game of Thrones, where she is portrayed by Bermudian-English actress"
            " Lena Headey. Headey has received widespread critical acclaim for her portrayal of"
            " the character, making her one of the most popular and longest-running actors on"
            " television."
        ),
    ),
    "enemy_phrase_machine": PlanFixture(
        query="Who said my enemy's enemy is my friend?",
        questions=(
            'What did the Latin phrase "Amicus meus, inimicus inimici mei" mean?',
            'During what time period did the Latin phrase "Amicus meus, inimicus inimici mei"'
            " become common?",
            'When did the English version of the phrase "the enemy of my enemy is my friend"'
            " first appear?",
            "Who was the first person to use the modern English version of the phrase"
            ' "the enemy of my enemy is my friend"?',
            'When did the English version of the phrase "the enemy of my enemy is my friend"'
            " first appear?",
        ),
        summary_text=(
            "The exact meaning of the modern phrase was first expressed in the Latin phrase"
            ' "Amicus meus, inimicus inimici mei" ("my friend, the enemy of my enemy"), which'
            " had become common throughout Europe by the early 1700s, while the first recorded"
            " use of the current English version came in 1884. The first recorded instance for"
            " this phrasing comes from Gabriel Manigault, who in his 1884 Political Creed"
            ' described the sense that "the enemy of my enemy is my friend" as a "natural'
            ' feeling".'
        ),
    ),
    "enemy_phrase_edited": PlanFixture(
        query="Who said my enemy's enemy is my friend?",
        questions=(
            "Who was the first person to use the modern English version of the phrase"
            ' "the enemy of my enemy is my friend"?',
            "What did Gabriel Manigault describe as a natural feeling?",
        ),
        summary_text=(
            "The first recorded instance for this phrasing comes from Gabriel Manigault, who in"
            ' his 1884 Political Creed described the sense that "the enemy of my enemy is my'
            ' friend" as a "natural feeling".'
        ),
    ),
    "bald_eagle_machine": PlanFixture(
        query="Is it illegal to have a bald eagle?",
        questions=(
            "What is the section number of the Bald and Golden Eagle Protection Act in the"
            " United States Code?",
            "What is the Bald and Golden Eagle Protection Act?",
            "What does the Bald and Golden Eagle Protection Act prohibit the taking of?",
            "Along with golden eagles, what bald eagle is protected by the Bald and Golden"
            " Eagle Protection Act?",
            "The Bald and Golden Eagle Protection Act prohibits the taking of bald eagles,"
            " their parts, nests, and what else?",
            "Who is required to obtain a permit from the Secretary of the Interior to take"
            " bald eagles?",
            "What can result in a fine of up to $100,000?",
            "How much is the fine for a first offense of taking a bald eagle?",
        ),
        summary_text=(
            "The Bald and Golden Eagle Protection Act (16 U.S.C. 668-668d), enacted in 1940,"
            " and amended several times since, prohibits anyone, without a permit issued by the"
            ' Secretary of the Interior, from "taking" bald or golden eagles, including their'
            " parts (including feathers), nests, or eggs. The Act provides criminal penalties"
            " for persons who take, possess, sell, purchase, barter, offer to sell, purchase or"
            " barter, transport, export or import, at any time or any manner, any bald eagle"
            " (or any golden eagle), alive or dead, or any part (including feathers), nest, or"
            " egg thereof. A violation of the Act can result in a fine of up to $100,000"
            " ($200,000 for organizations), imprisonment for one year, or both, for a first"
            " offense."
        ),
    ),
    "bald_eagle_edited": PlanFixture(
        query="Is it illegal to have a bald eagle?",
        questions=(
            "What is the Bald and Golden Eagle Protection Act?",
            "Can Native Americans ask for an eagle permit?",
        ),
        summary_text=(
            "The Bald and Golden Eagle Protection Act (16 U.S.C. 668-668d), enacted in 1940,"
            " and amended several times since, prohibits anyone, without a permit issued by the"
            ' Secretary of the Interior, from "taking" bald or golden eagles, including their'
            " parts (including feathers), nests, or eggs. Native Americans may ask for an eagle"
            " permit."
        ),
    ),
    "software_engineer_machine": PlanFixture(
        query="Is software engineer a good job?",
        questions=(
            "What is projected to grow 22% from 2020 to 2030?",
            "What is the average salary for a software engineer?",
            "What is the average salary for a software engineer?",
            "Along with management, in what area do software engineers earn more than most"
            " other workers?",
        ),
        summary_text=(
            "Employment of software developers is projected to grow 22% from 2020 to 2030,"
            " which is much higher than the national average for other occupations. The average"
            " salary for a software engineer is $99,400 with an average yearly growth rate of"
            " 7%. In addition, software engineers earn more than most other workers in the more"
            " traditional business aspects such as management and sales."
        ),
    ),
    "software_engineer_edited": PlanFixture(
        query="Is software engineer a good job?",
        questions=(
            "What is the average salary for a software engineer?",
            "What degree should you get to become a software engineer?",
        ),
        summary_text=(
            "The average salary for a software engineer is $99,400 according to the BLS."
            " Having a bachelor's degree in computer science or software engineering is"
            " recommended, though a master's degree may be more beneficial."
        ),
    ),
}


def corpus_jsonl(name: str) -> str:
    """The named demo corpus as line-delimited JSON."""
    records = CORPORA[name]
    return "".join(json.dumps(record, ensure_ascii=False) + "\n" for record in records)


def load_corpus(name: str) -> Corpus:
    return ingest_local(io.StringIO(corpus_jsonl(name)))


def write_fixture_files(out_dir: str | Path) -> list[Path]:
    """Write all bundled corpora and plan files; rerunning is byte-idempotent."""
    out = Path(out_dir)
    written: list[Path] = []
    corpora_dir = out / "corpora"
    corpora_dir.mkdir(parents=True, exist_ok=True)
    for name in sorted(CORPORA):
        path = corpora_dir / f"{name}.jsonl"
        path.write_text(corpus_jsonl(name), encoding="utf-8")
        written.append(path)
    plans_dir = out / "plans"
    plans_dir.mkdir(parents=True, exist_ok=True)
    for name in sorted(PLANS):
        path = plans_dir / f"{name}.txt"
        path.write_text(PLANS[name].emission() + "\n", encoding="utf-8")
        written.append(path)
    return written
