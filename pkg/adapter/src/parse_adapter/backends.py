"""Parser backends producing Universal Dependencies token rows.

A backend maps raw question text to sentences of
``(form, lemma, upos, head, deprel)`` rows with 1-based heads (0 = root).
Two backends exist: ``builtin``, a deterministic lexicon-and-heuristics
pipeline with no third-party dependencies, and ``spacy:<model>``, which
wraps an installed spaCy pipeline. Both guarantee structurally valid
trees: contiguous ids, exactly one root, no cycles.
"""

from __future__ import annotations

import re


class AdapterStartupError(RuntimeError):
    """The requested parser model cannot be loaded."""


TokenRow = tuple[str, str, str, int, str]

_NUMBER = re.compile(r"\d+(?:,\d{3})*(?:\.\d+)?")
_TOKEN = re.compile(r"\d+(?:,\d{3})*(?:\.\d+)?|[A-Za-z]+|'[A-Za-z]+|[^\sA-Za-z\d]")
_SENT_BOUNDARY = re.compile(r"(?<=[.!?])\s+")

DET = {"a", "an", "the", "each", "every", "this", "that", "these", "those", "some",
       "any", "no", "all", "both", "either", "neither", "another", "such"}
ADP = {"of", "in", "on", "at", "by", "with", "from", "into", "onto", "over", "under",
       "between", "among", "during", "per", "off", "through", "around", "near",
       "inside", "outside", "within", "about", "upon", "to", "for", "than"}
PRON = {"i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them",
        "his", "hers", "its", "ours", "yours", "theirs", "their", "our", "your", "my",
        "mine", "who", "whom", "whose", "which", "what", "himself", "herself",
        "itself", "themselves", "myself", "yourself", "ourselves", "everyone",
        "someone", "anyone", "nobody", "everybody", "something", "anything",
        "nothing", "there"}
AUX = {"is", "are", "was", "were", "be", "been", "being", "am", "can", "could",
       "will", "would", "shall", "should", "may", "might", "must", "do", "does",
       "did"}
CCONJ = {"and", "or", "but", "nor", "so", "yet"}
SCONJ = {"if", "because", "when", "while", "although", "though", "since", "unless",
         "until", "whether", "where", "as"}
ADV = {"how", "now", "then", "also", "only", "just", "very", "too", "again",
       "already", "still", "together", "eventually", "finally", "later", "twice",
       "once", "away", "back", "here", "not", "well"}
ADJ = {"many", "much", "few", "fewer", "less", "more", "most", "new", "old",
       "first", "second", "third", "fourth", "fifth", "last", "next", "same",
       "other", "big", "small", "long", "short", "high", "low", "loose", "full",
       "enough", "certain", "exact", "initial", "annual", "total"}
NUM_WORDS = {"zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
             "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
             "sixteen", "seventeen", "eighteen", "nineteen", "twenty", "thirty",
             "forty", "fifty", "sixty", "seventy", "eighty", "ninety", "hundred",
             "thousand", "million", "half", "dozen"}
PART = {"'s", "'t", "'ve", "'ll", "'re", "'d", "'m"}
SYM = set("$%€£#&*+=/\\^~<>|")

VERBS = {
    "add", "answer", "arrive", "ask", "bake", "be", "begin", "borrow", "bring",
    "brush", "build", "buy", "call", "carry", "catch", "change", "charge", "clean",
    "climb", "clock", "collect", "come", "complete", "cook", "cost", "count",
    "cut", "decide", "decrease", "deliver", "divide", "double", "drink", "drive",
    "drop", "earn", "eat", "end", "equal", "fill", "find", "finish", "fly",
    "gather", "get", "give", "go", "grow", "had", "happen", "has", "have", "help",
    "hold", "increase", "invite", "keep", "know", "learn", "leave", "lend", "like",
    "live", "lose", "love", "make", "measure", "meet", "move", "need", "notice",
    "open", "owe", "own", "pack", "paint", "pay", "pick", "plan", "plant", "play",
    "press", "put", "rain", "reach", "read", "receive", "remain", "remove",
    "return", "ride", "ring", "run", "save", "say", "see", "sell", "send", "share",
    "ship", "show", "sing", "sit", "sleep", "solve", "spend", "split", "stand",
    "start", "stay", "store", "study", "swim", "take", "teach", "tell", "think",
    "throw", "total", "travel", "triple", "use", "visit", "wait", "walk", "want",
    "wash", "watch", "water", "wear", "win", "wonder", "work", "write",
    # common irregular past forms that suffix stripping cannot reach
    "bought", "brought", "came", "caught", "drank", "drove", "ate", "fell",
    "flew", "found", "gave", "went", "got", "grew", "held", "kept", "knew",
    "left", "lent", "lost", "made", "met", "paid", "put", "ran", "rang", "read",
    "rode", "said", "sang", "sat", "saw", "sent", "slept", "sold", "spent",
    "stood", "swam", "taught", "thought", "threw", "told", "took", "wore", "won",
    "wrote",
}


def _verb_candidates(word: str):
    yield word
    if word.endswith("ies") and len(word) > 4:
        yield word[:-3] + "y"
    if word.endswith("es") and len(word) > 3:
        yield word[:-2]
    if word.endswith("s") and len(word) > 2:
        yield word[:-1]
    if word.endswith("ied") and len(word) > 4:
        yield word[:-3] + "y"
    if word.endswith("ed") and len(word) > 3:
        yield word[:-2]
        yield word[:-1]
    if word.endswith("ing") and len(word) > 4:
        yield word[:-3]
        yield word[:-3] + "e"


def _is_verb(word: str) -> bool:
    return any(c in VERBS for c in _verb_candidates(word))


_CLOSED = (
    (DET, "DET"), (ADP, "ADP"), (PRON, "PRON"), (AUX, "AUX"), (CCONJ, "CCONJ"),
    (SCONJ, "SCONJ"), (ADV, "ADV"), (ADJ, "ADJ"), (NUM_WORDS, "NUM"),
)


def _tag(form: str) -> str:
    low = form.lower()
    if form[0].isdigit():
        return "NUM"
    if low in PART:
        return "PART"
    if len(form) == 1 and not form.isalnum():
        return "SYM" if form in SYM else "PUNCT"
    for lexicon, tag in _CLOSED:
        if low in lexicon:
            return tag
    if _is_verb(low):
        return "VERB"
    if form[0].isupper():
        return "PROPN"
    return "NOUN"


def _lemma(form: str, upos: str) -> str:
    low = form.lower()
    if upos == "VERB":
        for candidate in _verb_candidates(low):
            if candidate in VERBS:
                return candidate
    if upos == "NOUN" and low.endswith("s") and len(low) > 3:
        return low[:-1]
    if upos in {"PROPN", "NUM", "PUNCT", "SYM"}:
        return form
    return low


def _nearest_right(tags, i, wanted) -> int | None:
    for j in range(i + 1, len(tags) + 1):
        if tags[j - 1] in wanted:
            return j
    return None


def _attach(tags, root: int) -> list[tuple[int, str]]:
    """Heads and relations for one sentence; all arcs point either to the
    root or strictly rightward, so the result is always a tree."""
    n = len(tags)
    out: list[tuple[int, str]] = []
    adp_targets = {}
    for i in range(1, n + 1):
        if tags[i - 1] == "ADP":
            target = _nearest_right(tags, i, {"NOUN", "PROPN", "PRON", "NUM"})
            if target is not None:
                adp_targets[target] = True
    for i in range(1, n + 1):
        if i == root:
            out.append((0, "root"))
            continue
        tag = tags[i - 1]
        head, deprel = root, "dep"
        if tag == "PUNCT":
            deprel = "punct"
        elif tag == "DET":
            target = _nearest_right(tags, i, {"NOUN", "PROPN"})
            if target is not None and target != i:
                head, deprel = target, "det"
        elif tag == "ADJ":
            target = _nearest_right(tags, i, {"NOUN", "PROPN"})
            if target is not None and target != i:
                head, deprel = target, "amod"
        elif tag == "NUM":
            target = _nearest_right(tags, i, {"NOUN", "PROPN"})
            if target is not None and target != i:
                head, deprel = target, "nummod"
            else:
                deprel = "obj" if i > root else "nsubj"
        elif tag == "ADP":
            target = _nearest_right(tags, i, {"NOUN", "PROPN", "PRON", "NUM"})
            if target is not None and target != i:
                head, deprel = target, "case"
            else:
                deprel = "case"
        elif tag == "PART":
            if i > 1 and i - 1 != root:
                head, deprel = i - 1, "case"
            else:
                deprel = "case"
        elif tag == "AUX":
            deprel = "aux"
        elif tag == "CCONJ":
            deprel = "cc"
        elif tag == "SCONJ":
            deprel = "mark"
        elif tag == "ADV":
            deprel = "advmod"
        elif tag == "PRON":
            deprel = "nsubj" if i < root else "obj"
        elif tag in {"NOUN", "PROPN"}:
            if adp_targets.get(i):
                deprel = "obl"
            else:
                deprel = "nsubj" if i < root else "obj"
        elif tag == "VERB":
            deprel = "conj"
        if head == i:  # never self-attach
            head, deprel = root, "dep"
        out.append((head, deprel))
    return out


class BuiltinBackend:
    """Deterministic heuristic English pipeline; structural validity over
    parse quality. Intended for offline runs and tests."""

    name = "builtin"

    def parse(self, text: str) -> list[list[TokenRow]]:
        sentences = []
        for chunk in _SENT_BOUNDARY.split(text):
            forms = _TOKEN.findall(chunk)
            if not forms:
                continue
            tags = [_tag(form) for form in forms]
            root = None
            for wanted in ({"VERB"}, {"AUX"}, {"NOUN", "PROPN", "NUM", "PRON"}):
                for i, tag in enumerate(tags, start=1):
                    if tag in wanted:
                        root = i
                        break
                if root is not None:
                    break
            if root is None:
                root = 1
            rows = []
            for i, (form, tag, (head, deprel)) in enumerate(
                zip(forms, tags, _attach(tags, root)), start=1
            ):
                rows.append((form, _lemma(form, tag), tag, head, deprel))
            sentences.append(rows)
        return sentences


class SpacyBackend:
    """Wraps an installed spaCy pipeline; tags are spaCy's UD pos_ values."""

    def __init__(self, model_name: str):
        try:
            import spacy
        except ImportError as exc:
            raise AdapterStartupError(
                "spaCy is not installed; install the 'spacy' extra or use the "
                "builtin backend"
            ) from exc
        try:
            self.nlp = spacy.load(model_name)
        except Exception as exc:
            raise AdapterStartupError(
                f"cannot load spaCy model {model_name!r}: {exc}"
            ) from exc
        self.name = f"spacy:{model_name}"

    def parse(self, text: str) -> list[list[TokenRow]]:
        doc = self.nlp(text)
        sentences = []
        for sent in doc.sents:
            rows = []
            for tok in sent:
                head = 0 if tok.head is tok else tok.head.i - sent.start + 1
                deprel = tok.dep_.lower() or "dep"
                rows.append((tok.text, tok.lemma_ or tok.text, tok.pos_, head,
                             "root" if head == 0 else deprel))
            if rows:
                sentences.append(rows)
        return sentences


def load_backend(model_name: str):
    """``builtin`` or ``spacy:<pipeline>``; anything else is a startup error."""
    if model_name == "builtin":
        return BuiltinBackend()
    if model_name.startswith("spacy:"):
        return SpacyBackend(model_name[len("spacy:"):])
    raise AdapterStartupError(
        f"unknown parser model {model_name!r}; expected 'builtin' or 'spacy:<model>'"
    )
