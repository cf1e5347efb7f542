"""PK batch sampling: P labels, K sequences each, so every batch holds anchor-positive pairs"""
from gaitembed.errors import InsufficientData


def group_by_label(sequences):
    """Mapping label -> list of sequences, in input order"""
    groups = {}
    for sequence in sequences:
        groups.setdefault(sequence.label, []).append(sequence)
    return groups


def sample_pk_batch(sequences, labels_per_batch, sequences_per_label, rng):
    """Draws P labels without replacement, then K sequences per label without replacement"""
    groups = group_by_label(sequences)
    eligible = sorted(label for label, group in groups.items() if len(group) >= sequences_per_label)
    if len(eligible) < labels_per_batch:
        deficient = sorted(label for label, group in groups.items()
                           if len(group) < sequences_per_label)
        raise InsufficientData(
            f"need {labels_per_batch} labels with {sequences_per_label} sequences each, "
            f"found {len(eligible)}; deficient labels: {deficient}", deficient)

    chosen = rng.choice(len(eligible), size=labels_per_batch, replace=False)
    batch = []
    for label_index in chosen:
        group = groups[eligible[label_index]]
        picks = rng.choice(len(group), size=sequences_per_label, replace=False)
        batch.extend(group[pick] for pick in picks)
    return batch
