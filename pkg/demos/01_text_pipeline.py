"""Text pipeline walkthrough: tokenization, vocabulary, synthetic data.

Run:  python demos/01_text_pipeline.py
"""

from modgate import build_vocab, gen_synthetic, tokenize
from modgate.textpipe import trigger_lexicon

print("== tokenization ==")
for text in ("You IDIOT!!", "καλό σχόλιο", "win 3-0 (easily)"):
    print(f"  {text!r:30s} -> {tokenize(text)}")

print("\n== synthetic corpus ==")
data = gen_synthetic(n=2000, reject_ratio=0.3, seed=42)
rejected = [c for c in data if c.gold == 1.0]
print(f"  {len(data)} comments, {len(rejected)} rejected")
print(f"  example accept: {data[0].text[:60]}...")
print(f"  example reject: {rejected[0].text[:60]}...")

triggers = trigger_lexicon()
hits = [t for t in rejected[0].tokens if t in triggers]
print(f"  planted triggers in that reject: {hits}")

print("\n== vocabulary ==")
vocab = build_vocab(data, min_freq=2)
print(f"  size {vocab.size}, OOV index {vocab.oov_index}")
most = vocab.index_to_token[:5]
print(f"  most frequent tokens: {list(most)}")
ids = vocab.encode(data[0].tokens[:6])
print(f"  encode {data[0].tokens[:6]} -> {ids.tolist()}")
print(f"  decode back -> {vocab.decode(ids)}")
print(f"  unseen word maps to OOV: {vocab.encode(['zzzzz']).tolist()} == [{vocab.oov_index}]")
