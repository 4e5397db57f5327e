"""Text front end: tokenization, vocabulary building, and TF-IDF vectors."""

import numpy as np

from moodspring import build_vocab, tokenize, vectorize

corpus = [
    "What a lovely sunny day!",
    "Lovely weather — calm and gentle.",
    "This terrible rain again...",
    "Terrible, terrible gloomy day.",
]

docs = [tokenize(text) for text in corpus]
print("tokenized:", docs[0])

vocab = build_vocab(docs, min_df=1)
print(f"vocabulary of {vocab.size} terms over {vocab.n_docs} docs")
print("terms:", vocab.terms)
print("document frequencies:", dict(zip(vocab.terms, vocab.df)))

for text in ("a lovely day", "terrible rain", "words the corpus never saw"):
    fv = vectorize(tokenize(text), vocab)
    norm = np.linalg.norm(fv.values)
    top = [vocab.terms[i] for i in np.argsort(fv.values)[::-1][:2] if fv.values[i] > 0]
    print(f"{text!r}: L2 norm {norm:.3f}, strongest coordinates {top}")

counts = vectorize(tokenize("day day day"), vocab, mode="tf")
nonzero = {t: int(c) for t, c in zip(vocab.terms, counts.values) if c}
print("raw tf for 'day day day':", nonzero)
