"""Judge task prompts for extraction, verification and assessment.

The templates are fixed verbatim, worked examples included, because the
downstream parsers key on the exact output grammar they demonstrate.
Slots are written ``{name}`` and substituted literally, so braces inside
slot values pass through untouched.
"""

from __future__ import annotations

import enum
from typing import Mapping


class MissingSlot(ValueError):
    """A template slot was absent or empty at render time."""


class PromptTask(enum.Enum):
    EXTRACT = "extract"
    VERIFY = "verify"
    ASSESS = "assess"


EXTRACTION_TEMPLATE = """\
- Find every sentence containing object facts.
- Break sentences into atomic statements.
- Skip the sentences without statements.
- If there is no valid sentence, output "No statements".
- Do not output any explanation or other words.
- Strictly follow the output format shown in the example.

Here is an example:
# Response
It is difficult to say which game has been released in more versions without more information, so I can only guess based on my training data.
Arthur's Magazine was likely started first. It was possibly founded in 1923 by Arthur K. Watson, a prominent publisher in the field of men's magazines.
First for Women, on the other hand, was not founded until 1989. It was created as a spin-off of Family Circle magazine, which was founded in 1957.

# Statements
>> Sentence 1: Arthur's Magazine was likely started first.
* Arthur's Magazine was likely started first.
>> Sentence 2: It was possibly founded in 1923 by Arthur K. Watson, a prominent publisher in the field of men's magazines.
* Arthur's Magazine was possibly founded in 1923.
* Arthur's Magazine was founded by Arthur K. Watson.
* Arthur K. Watson is a prominent publisher in the field of men's magazines.
>> Sentence 3: First for Women, on the other hand, was not founded until 1989.
* First for Women was not founded until 1989.
>> Sentence 4: It was created as a spin-off of Family Circle magazine, which was founded in 1957.
* First for Women was created as a spin-off of Family Circle magazine.
* Family Circle magazine was founded in 1957.

And then comes your task:
# Response
{response}

# Statements"""

VERIFICATION_TEMPLATE = """\
Choose from "Correct", "Vague" and "Wrong" for the verification of the statement.
- "Correct": The statement is supported by the materials.
- "Vague": Hard to determine the truthfulness of the statement based on the materials.
- "Wrong": The statement is negated by the materials.
Directly output the verification result without explanation.
Here is an example:

# Materials
- First for Women is a women's magazine published by Bauer Media Group in the USA. The magazine was started in 1989. It is based in Englewood Cliffs, New Jersey. In 2011 the circulation of the magazine was 1,310,696 copies.
- Arthur's Magazine (1844--1846) was an American literary periodical published in Philadelphia in the 19th century. Edited by T.S. Arthur, it featured work by Edgar A. Poe, J.H. Ingraham, Sarah Josepha Hale, Thomas G. Spear, and others. In May 1846 it was merged into "Godey's Lady's Book".
- The correct answer for the question "Which magazine was started first Arthur's Magazine or First for Women" may be "Arthur's Magazine".
# Statement
Arthur's Magazine was likely started first.
# Verification
Correct

And then comes your task:
# Materials
{materials}
# Statement
{statement}
# Verification"""

ASSESSMENT_TEMPLATE = """\
Evaluate the helpfulness of the statement:
- "5": The statement answer the question.
- "4": The statement provides crucial information.
- "3": The statement contains relevant facts.
- "2": The statement is about other supplementary facts.
- "1": The statement is useless or not relevant at all.
Directly output the evaluation result without explanation.

Here is an example:
# Question
Which magazine was started first Arthur's Magazine founded by Arthur K. Watson or First for Women?
# Response
It is difficult to say which game has been released in more versions without more information, so I can only guess based on my training data.
Arthur's Magazine was likely started first. It was possibly founded in 1923 by Arthur K. Watson, a prominent publisher in the field of men's magazines.
First for Women, on the other hand, was not founded until 1989. It was created as a spin-off of Family Circle magazine, which was founded in 1957.
# Statement
Arthur's Magazine was possibly founded in 1923.
# Evaluation
4

And then comes your task:
# Question
{question}
# Response
{response}
# Statement
{statement}
# Evaluation"""

_TEMPLATES = {
    PromptTask.EXTRACT: EXTRACTION_TEMPLATE,
    PromptTask.VERIFY: VERIFICATION_TEMPLATE,
    PromptTask.ASSESS: ASSESSMENT_TEMPLATE,
}

_SLOTS = {
    PromptTask.EXTRACT: ("response",),
    PromptTask.VERIFY: ("materials", "statement"),
    PromptTask.ASSESS: ("question", "response", "statement"),
}


def render_prompts(task: PromptTask, slots: Mapping[str, str]) -> str:
    """Instantiate the template for ``task`` with the given slot values.

    Every slot the template declares must be present and non-empty: a
    verification prompt without materials would invite the judge to
    answer from its own parametric memory.  Unknown slot names are
    rejected as probable caller typos.
    """
    expected = _SLOTS[task]
    unknown = sorted(set(slots) - set(expected))
    if unknown:
        raise ValueError(f"unknown slots for {task.value}: {unknown}")
    rendered = _TEMPLATES[task]
    for name in expected:
        value = slots.get(name)
        if not value:
            raise MissingSlot(f"slot {name!r} is missing or empty for {task.value}")
        rendered = rendered.replace("{" + name + "}", value)
    return rendered
