"""Hand matrix-chain oracle for the nested and simple interferometers.

Independent of the graph code: each stage is an explicit unitary on a
fixed mode basis, and backward fields use the transpose chain.
"""

import numpy as np

t = 1 / np.sqrt(2)
r = 1j / np.sqrt(2)
BS = np.array([[t, r], [r, t]])


def embed(block, modes, n=3):
    """Place a 2x2 block acting on ``modes`` inside an n x n identity."""
    m = np.eye(n, dtype=complex)
    for a, i in enumerate(modes):
        for b, j in enumerate(modes):
            m[i, j] = block[a, b]
    return m


def nested():
    """Stage vectors for the nested MZI, forward from S1 and backward from each detector.

    Basis per stage:
      L1 (in, BS1 spare, BS2 spare) -> BS1 -> (A1 lead, Q1, BS2 spare)
      -> BS2 on modes (0, 2) -> (Q2, Q1, Q3) -> mirrors -> mid cut
      -> BS3 on (0, 2) -> (E1, Q1, D3) -> BS4 on (1, 0) -> (D2, D1, D3)
    """
    b1 = embed(BS, (0, 1))            # (in, spare1) -> (out1=A1 lead, out2=Q1)
    m1 = np.diag([1, 1j, 1])          # M1 on Q1
    b2 = embed(BS, (0, 2))            # (in1=lead, in2=spare2) -> (Q2, Q3)
    m23 = np.diag([1j, 1, 1j])        # M2 on Q2, M3 on Q3
    b3 = embed(BS, (0, 2))            # (Q2, Q3) -> (E1, D3)
    b4 = embed(BS, (1, 0))            # (in1=Q1, in2=E1) -> (D1 at mode 1, D2 at mode 0)
    to_out = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]])  # reorder to (D1, D2, D3)
    # forward stage vectors
    psi0 = np.array([1, 0, 0], dtype=complex)
    after_b1 = b1 @ psi0
    after_m1 = m1 @ after_b1
    after_b2 = b2 @ after_m1
    mid = m23 @ after_b2
    after_b3 = b3 @ mid
    out = to_out @ (b4 @ after_b3)
    down_from_mid = to_out @ b4 @ b3  # mid -> detectors
    chi_mid = {k: down_from_mid.T[:, i] for i, k in enumerate(("D1", "D2", "D3"))}
    down_from_lead = down_from_mid @ m23 @ b2  # after_m1 basis -> detectors
    chi_lead = {k: down_from_lead.T[:, i] for i, k in enumerate(("D1", "D2", "D3"))}
    after_b3_chi = {k: (to_out @ b4).T[:, i] for i, k in enumerate(("D1", "D2", "D3"))}
    return {
        "mid_psi": {"Q1": mid[1], "Q2": mid[0], "Q3": mid[2]},
        "mid_chi": {k: {"Q1": v[1], "Q2": v[0], "Q3": v[2]} for k, v in chi_mid.items()},
        "lead_psi": after_m1[0],
        "lead_chi": {k: v[0] for k, v in chi_lead.items()},
        "e1_psi": after_b3[0],
        "e1_chi": {k: v[0] for k, v in after_b3_chi.items()},
        "detectors": {"D1": out[0], "D2": out[1], "D3": out[2]},
    }


def simple():
    b = BS
    m = np.diag([1j, 1j])
    u = b @ m @ b
    psi_in = np.array([1, 0], dtype=complex)
    arms = m @ b @ psi_in
    out = b @ arms
    chi_arms = {k: b.T[:, i] for i, k in enumerate(("D1", "D2"))}
    return {"arms_psi": arms, "arms_chi": chi_arms, "detectors": {"D1": out[0], "D2": out[1]}, "U": u}


if __name__ == "__main__":
    o = nested()
    pf = {k: abs(v) ** 2 for k, v in o["mid_psi"].items()}
    print("detectors", {k: abs(v) ** 2 for k, v in o["detectors"].items()})
    print("mid p^f", pf, "E1 psi", o["e1_psi"])
    for d in ("D1", "D2", "D3"):
        chi = o["mid_chi"][d]
        D = o["detectors"][d]
        print(d, "chi", chi, "W", {k: chi[k] * o["mid_psi"][k] / D for k in chi},
              "P", {k: abs(chi[k]) ** 2 * pf[k] for k in chi}, "lead chi", o["lead_chi"][d])
    s = simple()
    print("simple", {k: abs(v) ** 2 for k, v in s["detectors"].items()}, s["arms_chi"])
