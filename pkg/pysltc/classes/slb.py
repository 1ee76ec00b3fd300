class SlbClass():
    """
    Unique screenline-based (SLB) tour: tours sharing one crossing signature.

    :param signature: tuple of crossed screenline ids in travel order, with multiplicity.
    :param members: ids of the node tours with this signature.
    """
    def __init__(self, signature, members):
        self.signature = tuple(signature)
        self.members = sorted(members)

    @property
    def count(self):
        return len(self.members)

    def crossed(self):
        return set(self.signature)

    def __repr__(self):
        return "SlbClass(%s, count=%s)" % ("-".join(str(s) for s in self.signature), self.count)


class MappingMatrix():
    """
    Binary |L| x |K| incidence matrix of SLB classes (rows) against screenlines (columns).

    :param matrix: scipy.sparse.csr_matrix.
    :param signatures: row signatures in canonical class order.
    :param screenline_ids: column screenline ids.
    """
    def __init__(self, matrix, signatures, screenline_ids):
        self.matrix = matrix
        self.signatures = list(signatures)
        self.screenline_ids = list(screenline_ids)

    @property
    def shape(self):
        return self.matrix.shape

    def toarray(self):
        return self.matrix.toarray()
