"""Prompt templates and their assembly.

Templates are versioned text files shipped with the package; the builders here
substitute placeholders and are pinned by golden tests, so the exact strings
sent to a remote model are verifiable without any network.
"""

from __future__ import annotations

from importlib import resources

from .base import ExplanationRequest, OracleRequestContext

PROMPT_VERSION = "v1"

_LEVEL_TEXT = {
    "middle_school": "middle school",
    "high_school": "high school",
    "undergraduate": "undergraduate",
    "graduate": "graduate",
}


def load_template(name: str, version: str = PROMPT_VERSION) -> str:
    """Read a prompt template shipped inside the package."""
    path = resources.files("rpkt.oracle").joinpath(f"prompts/{name}_{version}.txt")
    return path.read_text(encoding="utf-8")


def build_analysis_prompt(question: str, education_level) -> str:
    return load_template("analysis").format(
        question=question,
        education_level=_LEVEL_TEXT[education_level.value],
    )


def build_extraction_prompt(concept_label: str, ctx: OracleRequestContext) -> str:
    chain = " -> ".join(ctx.ancestor_chain) if ctx.ancestor_chain else "(none)"
    return load_template("extraction").format(
        concept=concept_label,
        question=ctx.question,
        ancestor_chain=chain,
        education_level=_LEVEL_TEXT[ctx.education_level.value],
    )


def build_explanation_prompt(request: ExplanationRequest) -> str:
    """Assemble the explanation prompt: known concepts acknowledged, unknown
    concepts addressed in prerequisite-first order, then synthesis."""
    if request.known:
        known_names = ", ".join(c.label for c in request.known)
        known_block = f"The student already understands: {known_names}."
    else:
        known_block = "The student has not confirmed knowledge of any prerequisite yet."

    if request.unknown_ordered:
        lines = "\n".join(f"{i + 1}. {c.label}" for i, c in enumerate(request.unknown_ordered))
        unknown_block = (
            "The student still needs these concepts, listed in learning order"
            " (each builds on the ones before it):\n" + lines
        )
        teaching_step = (
            "Explains each missing concept in the given order, building each"
            " explanation on the concepts before it."
        )
    else:
        unknown_block = (
            "The student has confirmed every prerequisite; there are no missing concepts."
        )
        teaching_step = (
            "Explains the topic directly, acknowledging that the student has"
            " mastered all of its prerequisites."
        )

    return load_template("explanation").format(
        question=request.question,
        education_level=_LEVEL_TEXT[request.education_level.value],
        known_block=known_block,
        unknown_block=unknown_block,
        teaching_step=teaching_step,
    )
