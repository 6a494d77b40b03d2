from __future__ import annotations

import string

from hypothesis import strategies as st

# Words drawn from a mixed-case latin alphabet plus a couple of non-ASCII
# letters, so unicode paths get exercised without grapheme complications.
WORD_ALPHABET = string.ascii_letters + string.digits + "àéñç"

words = st.text(alphabet=WORD_ALPHABET, min_size=1, max_size=20)

small_alphabets = st.lists(
    st.sampled_from(string.ascii_uppercase + string.ascii_lowercase + "0123456789"),
    min_size=2,
    max_size=30,
    unique=True,
)


def write_tsv(path, rows):
    """rows: iterable of (image_path, text) or (image_path, text, id)."""
    lines = ["\t".join(r) for r in rows]
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return path
