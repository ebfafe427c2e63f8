#ifndef SIGNFREE_H
#define SIGNFREE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_POINTER = 1,
  // A precondition of the called operation does not hold.
  SF_STATUS_INVALID_ARGUMENT = 2,
  SF_STATUS_RESOURCE_LIMIT = 3,
  SF_STATUS_NON_CONVERGENCE = 4,
  SF_STATUS_PARSE_ERROR = 5,
  SF_STATUS_IO_ERROR = 6,
  SF_STATUS_INVALID_UTF8 = 7,
  // The output buffer is shorter than the result.
  SF_STATUS_BUFFER_TOO_SMALL = 8,
  SF_STATUS_PANIC = 9,
} SfStatus;

typedef struct SfCircuit SfCircuit;

typedef struct SfHamiltonian SfHamiltonian;

typedef struct SfMapped SfMapped;

typedef struct SfMatrix SfMatrix;

// Structural flags of a matrix.
typedef struct SfClassFlags {
  bool hermitian;
  bool nonnegative_entries;
  bool stoquastic;
  bool column_stochastic;
  bool doubly_stochastic;
  bool symmetric;
  bool permutation;
  bool projector;
  bool psd;
} SfClassFlags;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or an empty string.
//
// The pointer stays valid until the next failing call on the same thread.
const char *sf_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library, freed at most once.
void sf_string_free(char *s);

// Parses a Hamiltonian file (version "1" JSON).
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum SfStatus sf_hamiltonian_from_json(const char *json, struct SfHamiltonian **out);

// Seeded random instance; `complex` adds `Y`-containing terms.
//
// # Safety
// `out` must be writable.
enum SfStatus sf_hamiltonian_random(size_t n,
                                    size_t locality,
                                    uint64_t seed,
                                    bool complex,
                                    struct SfHamiltonian **out);

// Diagonal Hamiltonian on `n` qubits with exactly `c` negative eigenvalues.
//
// # Safety
// `out` must be writable.
enum SfStatus sf_build_hc(size_t c, size_t n, struct SfHamiltonian **out);

// Serializes to JSON; release the string with [`sf_string_free`].
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum SfStatus sf_hamiltonian_to_json(const struct SfHamiltonian *h, char **out);

// Number of qubits, or 0 for a null handle.
//
// # Safety
// `h` must be null or a live handle.
size_t sf_hamiltonian_qubits(const struct SfHamiltonian *h);

// # Safety
// `h` must be null or a handle from this library, freed at most once.
void sf_hamiltonian_free(struct SfHamiltonian *h);

// Builds the sparse matrix of a Hamiltonian.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum SfStatus sf_hamiltonian_matrix(const struct SfHamiltonian *h, struct SfMatrix **out);

// Matrix dimension, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t sf_matrix_dim(const struct SfMatrix *m);

// Writes the ascending eigenvalues of a Hermitian matrix into `out[0..dim]`.
//
// # Safety
// `m` must be a live handle; `out` must hold `len` doubles.
enum SfStatus sf_matrix_eigenvalues(const struct SfMatrix *m, double *out, size_t len);

// # Safety
// `m` must be a live handle; `out` must be writable.
enum SfStatus sf_matrix_classify(const struct SfMatrix *m, double tol, struct SfClassFlags *out);

// # Safety
// `m` must be null or a handle from this library, freed at most once.
void sf_matrix_free(struct SfMatrix *m);

// Stoquastic lift on one extra qubit.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum SfStatus sf_map_stoquastize(const struct SfHamiltonian *h, struct SfMapped **out);

// Stochastic lift of a real Hamiltonian on one extra qubit.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum SfStatus sf_map_stochastize(const struct SfHamiltonian *h, struct SfMapped **out);

// Stochastic lift of a complex Hamiltonian on two extra qubits.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum SfStatus sf_map_stochastize_complex(const struct SfHamiltonian *h, struct SfMapped **out);

// Adds the ancilla penalty with parameter `p` to a stochastic lift.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum SfStatus sf_mapped_add_penalty(const struct SfMapped *m, double p, struct SfMapped **out);

// Copies out the realized matrix of a mapped Hamiltonian.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum SfStatus sf_mapped_matrix(const struct SfMapped *m, struct SfMatrix **out);

// Spectrum of the sector named by `label` ("minus", "plus", "v0".."v3").
//
// Writes `2^n` ascending eigenvalues and stores the count in `written`.
//
// # Safety
// `m` must be a live handle, `label` a NUL-terminated string, `out` must hold
// `len` doubles and `written` must be writable or null.
enum SfStatus sf_mapped_sector_spectrum(const struct SfMapped *m,
                                        const char *label,
                                        double *out,
                                        size_t len,
                                        size_t *written);

// # Safety
// `m` must be null or a handle from this library, freed at most once.
void sf_mapped_free(struct SfMapped *m);

// Closed-form gaps of the clock Hamiltonian.
//
// # Safety
// `block_gap` and `full_gap` must be writable.
enum SfStatus sf_gap_formulas(double s, size_t l, double *block_gap, double *full_gap);

// Parses a circuit file (version "1" JSON).
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum SfStatus sf_circuit_from_json(const char *json, struct SfCircuit **out);

// Number of gates, or 0 for a null handle.
//
// # Safety
// `c` must be null or a live handle.
size_t sf_circuit_len(const struct SfCircuit *c);

// # Safety
// `c` must be null or a handle from this library, freed at most once.
void sf_circuit_free(struct SfCircuit *c);

// Realized frustration-free clock Hamiltonian at parameter `s`.
//
// # Safety
// `c` must be a live handle; `out` must be writable.
enum SfStatus sf_clock_hamiltonian(const struct SfCircuit *c, double s, struct SfMatrix **out);

// History state as interleaved `(re, im)` pairs; needs `2 · 2^(n+L+1)` doubles.
//
// # Safety
// `c` must be a live handle; `out` must hold `len` doubles.
enum SfStatus sf_history_state(const struct SfCircuit *c, double s, double *out, size_t len);

// Optimal acceptance probability of the energy-threshold verifier on `c` registers.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum SfStatus sf_acceptance_probability(const struct SfHamiltonian *h,
                                        size_t c,
                                        double threshold,
                                        double *out);

// `<φ|(|α><α| ⊗ 1)|φ>` for an antisymmetric `φ`; both vectors interleaved.
//
// `phi_len` and `alpha_len` count complex entries.
//
// # Safety
// `phi` must hold `2 · phi_len` doubles, `alpha` `2 · alpha_len`; `out` must be writable.
enum SfStatus sf_first_register_weight(const double *phi,
                                       size_t phi_len,
                                       const double *alpha,
                                       size_t alpha_len,
                                       double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIGNFREE_H */
