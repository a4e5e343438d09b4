"""
Target prompt templates per edit type.
"""

import string

from ..core.errors import MissingAttribute, RequestError

TEMPLATES = {
    "color": "{color}-colored {source}",
    "object": "{object}",
    "material": "{source} made of {material}",
    "color+object": "{color}-colored {object}",
    "object+material": "{object} made of {material}",
}

# Attribute kinds each edit type samples, in template order
ATTRIBUTE_KINDS = {
    "color": ("color",),
    "object": ("object",),
    "material": ("material",),
    "color+object": ("color", "object"),
    "object+material": ("object", "material"),
}

# Manifest attribute name -> dictionary name
DICTIONARY_FOR = {"color": "colors", "object": "objects", "material": "materials"}


def template_fields(edit_type: str) -> list[str]:
    if edit_type not in TEMPLATES:
        raise RequestError(f"Unknown edit type '{edit_type}'")
    return [name for _, name, _, _ in string.Formatter().parse(TEMPLATES[edit_type]) if name]


def render_prompt(edit_type: str, source_object: str, attributes: dict) -> str:
    """
    Render the bare target phrase for one object.

    >>> render_prompt("material", "car", {"material": "gold"})
    'car made of gold'
    """
    values = {"source": source_object}
    for name in template_fields(edit_type):
        if name == "source":
            continue
        value = attributes.get(name)
        if not value:
            raise MissingAttribute(f"Edit type '{edit_type}' needs attribute '{name}'")
        values[name] = value
    return TEMPLATES[edit_type].format(**values)


def with_article(phrase: str) -> str:
    """Prefix 'a' or 'an' by the first letter."""
    phrase = phrase.strip()
    article = "an" if phrase and phrase[0].lower() in "aeiou" else "a"
    return f"{article} {phrase}"


def source_prompt(source_object: str) -> str:
    return with_article(source_object)
