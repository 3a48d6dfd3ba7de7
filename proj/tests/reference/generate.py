# Copyright 2026 The rgaudit Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Reference values frozen into the C++ tests.

Plain numpy by brute force over explicit state tables; shares no code with
the library. Run: python3 tests/reference/generate.py
"""

import itertools

import numpy as np


def states(n):
  # bit i of the state index is node i
  return np.array([[(s >> i) & 1 for i in range(n)] for s in range(2**n)], dtype=float)


def ops(n, max_degree):
  out = []
  for d in range(1, max_degree + 1):
    out += [list(c) for c in itertools.combinations(range(n), d)]
  return out


def op_values(n, basis):
  sig = 2 * states(n) - 1
  return np.array([[np.prod(sig[s, o]) for o in basis] for s in range(2**n)])


def sigmoid(z):
  return 1 / (1 + np.exp(-z))


def transition(w, a):
  n_out, n_in = w.shape
  hs = states(n_out)
  t = np.zeros((2**n_in, 2**n_out))
  for v, bits in enumerate(states(n_in)):
    p = sigmoid(w @ bits + a)
    t[v] = np.prod(np.where(hs == 1, p, 1 - p), axis=1)
  return t


def first_layer(w, a, x):
  p = sigmoid(w @ x + a)
  hs = states(w.shape[0])
  return np.prod(np.where(hs == 1, p, 1 - p), axis=1)


def output(layers, x):
  q = first_layer(*layers[0], x)
  for w, a in layers[1:]:
    q = q @ transition(w, a)
  return q


def couplings(p, n):
  basis = ops(n, n)
  o = op_values(n, basis)
  return -(np.log(p) @ o) / 2**n


def distribution(g, n):
  o = op_values(n, ops(n, n))
  h = o @ g
  e = np.exp(-(h - h.min()))
  return e / e.sum()


def rg_jacobian(w, a, g, step=1e-5):
  n_in, n_out = w.shape[1], w.shape[0]
  t = transition(w, a)
  f = lambda gg: couplings(distribution(gg, n_in) @ t, n_out)
  cols = []
  for b in range(len(g)):
    e = np.zeros(len(g))
    e[b] = step
    cols.append((f(g + e) - f(g - e)) / (2 * step))
  return np.array(cols).T


def fisher(layers, x, step=1e-5):
  # F_ij = sum_s d_i q_s d_j q_s / q_s with first derivatives by differences
  q0 = output(layers, x)
  grads = []
  for i in range(len(x)):
    e = np.zeros(len(x))
    e[i] = step
    grads.append((output(layers, x + e) - output(layers, x - e)) / (2 * step))
  d = np.array(grads)
  return (d / q0) @ d.T


def truncated_top(layers, x, max_degree):
  n1 = layers[0][0].shape[0]
  w2, a2 = layers[1]
  n2 = w2.shape[0]
  q1 = first_layer(*layers[0], x)
  t = transition(w2, a2)
  q2 = q1 @ t
  b1, b2 = ops(n1, max_degree), ops(n2, max_degree)
  o1, o2 = op_values(n1, b1), op_values(n2, b2)
  m1, m2 = q1 @ o1, q2 @ o2
  s2 = o2.T @ (q2[:, None] * o2)
  cross = (o2.T @ (t.T * q1) @ o1)  # <O_g(h2) O_b(h1)>
  lhs = np.outer(m2, m2) - s2
  rhs = np.outer(m2, m1) - cross
  tt = np.linalg.solve(lhs, rhs)
  return max(abs(np.linalg.eigvals(tt)))


def main():
  np.set_printoptions(precision=17)
  w = np.array([[0.7, -1.1], [0.4, 0.9]])
  a = np.array([0.2, -0.3])
  g = np.array([0.3, -0.2, 0.5])
  print("rg_jacobian (2->2):")
  print(repr(rg_jacobian(w, a, g)))

  layers = [(np.array([[0.8, -0.4, 0.3], [-0.6, 0.5, 0.9]]), np.array([0.1, -0.2])),
            (np.array([[1.2, -0.7], [0.5, 1.1]]), np.array([-0.3, 0.2]))]
  x = np.array([0.3, 0.6, 0.45])
  print("fisher (3-2-2) at x:")
  print(repr(fisher(layers, x)))

  eng = [(np.eye(3), np.array([-6.6, -4.92, -0.88]) - 0.5),
         (np.array([[0.53, 0.99, -4.37], [-0.07, 2.64, -4.35], [-2.12, -2.28, -7.9]]),
          np.array([3.4, 3.59, 1.04]))]
  print("engineered top |Lambda| (degree 2):", repr(truncated_top(eng, np.full(3, 0.5), 2)))
  print("engineered top |Lambda| (full basis):", repr(truncated_top(eng, np.full(3, 0.5), 3)))


if __name__ == "__main__":
  main()
