#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "motionauth/data/corpus.hpp"
#include "motionauth/synth/synth.hpp"
#include "support/tmpdir.hpp"

using namespace motionauth;

TEST_CASE("generate_corpus: users x sessions x trials x samples") {
  SynthConfig cfg;
  cfg.n_users = 3;
  cfg.seed = 11;
  Corpus c = generate_corpus(cfg);
  CHECK(c.trials.size() == 3u * 2u * 10u);
  for (const auto& t : c.trials) {
    CHECK(t.joints2d.rows() == 135);
    CHECK(t.joints2d.cols() == 12);
    CHECK(t.controller3d.rows() == 135);
  }
  CHECK(c.user_ids() == std::vector<std::string>({"u00", "u01", "u02"}));
}

TEST_CASE("generate_corpus: zero noise makes trials identical within a session") {
  SynthConfig cfg;
  cfg.n_users = 2;
  cfg.noise_scale = 0.0;
  cfg.seed = 13;
  Corpus c = generate_corpus(cfg);
  const MotionTrial* t1 = c.find("u00", 1, 1);
  const MotionTrial* t2 = c.find("u00", 1, 2);
  REQUIRE(t1 != nullptr);
  REQUIRE(t2 != nullptr);
  CHECK(t1->joints2d == t2->joints2d);
  CHECK(t1->controller3d == t2->controller3d);
}

TEST_CASE("generate_corpus: forearm length is constant through every trial") {
  SynthConfig cfg;
  cfg.n_users = 2;
  cfg.seed = 17;
  Corpus c = generate_corpus(cfg);
  for (const auto& t : c.trials) {
    // canonical columns: wrist (0,1), elbow (2,3)
    double first = -1;
    for (Eigen::Index i = 0; i < t.joints2d.rows(); ++i) {
      const double dx = t.joints2d(i, 0) - t.joints2d(i, 2);
      const double dy = t.joints2d(i, 1) - t.joints2d(i, 3);
      const double len = std::sqrt(dx * dx + dy * dy);
      if (first < 0) first = len;
      CHECK(std::fabs(len - first) < 1e-6);
    }
  }
}

TEST_CASE("signatures: distinct users are separated on the core lattice") {
  SynthConfig cfg;
  cfg.n_users = 6;
  cfg.seed = 19;
  for (int a = 0; a < cfg.n_users; ++a) {
    UserSignature sa = make_user_signature(cfg, a);
    for (int b = a + 1; b < cfg.n_users; ++b) {
      UserSignature sb = make_user_signature(cfg, b);
      const double sep =
          std::max(std::fabs(sa.shoulder.freq - sb.shoulder.freq),
                   std::fabs(sa.depth_freq - sb.depth_freq));
      CHECK(sep >= kSignatureSeparationMargin);
    }
  }
}

TEST_CASE("generate_corpus: digest is stable for a seed, distinct across seeds") {
  SynthConfig cfg;
  cfg.n_users = 2;
  cfg.seed = 23;
  Corpus a = generate_corpus(cfg);
  Corpus b = generate_corpus(cfg);
  CHECK(a.digest == b.digest);
  cfg.seed = 24;
  Corpus c = generate_corpus(cfg);
  CHECK(a.digest != c.digest);
}

TEST_CASE("emit + ingest reproduces the in-memory corpus bit for bit") {
  matest::TmpDir tmp("roundtrip");
  SynthConfig cfg;
  cfg.n_users = 2;
  cfg.trials = 3;  // keep the file round trip quick
  cfg.seed = 29;
  Corpus mem = generate_corpus(cfg);
  emit_corpus_files(cfg, tmp.path());
  Corpus disk = load_corpus(read_manifest(tmp / "manifest.json"));
  REQUIRE(disk.trials.size() == mem.trials.size());
  CHECK(disk.digest == mem.digest);
  for (std::size_t i = 0; i < mem.trials.size(); ++i) {
    CHECK(disk.trials[i].joints2d == mem.trials[i].joints2d);
    CHECK(disk.trials[i].controller3d == mem.trials[i].controller3d);
  }
  // and the normalized tensors stay bit-equal too
  normalize_corpus(mem);
  normalize_corpus(disk);
  for (std::size_t i = 0; i < mem.trials.size(); ++i)
    CHECK(disk.trials[i].controller3d == mem.trials[i].controller3d);
}

TEST_CASE("trial store: save/load round trip") {
  matest::TmpDir tmp("trialstore");
  SynthConfig cfg;
  cfg.n_users = 2;
  cfg.trials = 2;
  cfg.seed = 31;
  Corpus c = generate_corpus(cfg);
  normalize_corpus(c);
  save_trials(c, tmp / "trials.bin");
  Corpus back = load_trials(tmp / "trials.bin");
  CHECK(back.normalized);
  CHECK(back.digest == c.digest);
  CHECK(back.stats.mean3 == c.stats.mean3);
  REQUIRE(back.trials.size() == c.trials.size());
  for (std::size_t i = 0; i < c.trials.size(); ++i) {
    CHECK(back.trials[i].joints2d == c.trials[i].joints2d);
    CHECK(back.trials[i].controller3d == c.trials[i].controller3d);
    CHECK(back.trials[i].user_id == c.trials[i].user_id);
  }
}

TEST_CASE("oracle_eer: separated and indistinguishable score sets") {
  CHECK(oracle_eer({0.9, 0.9, 0.9}, {0.1, 0.1, 0.1}) == 0.0);
  CHECK(oracle_eer({0.5, 0.5}, {0.5, 0.5}) == 0.5);
}

TEST_CASE("oracle_windows: hand cases") {
  CHECK(oracle_windows(135, 40, 1).size() == 96);
  CHECK(oracle_windows(135, 135, 1) == std::vector<int>({0}));
  CHECK(oracle_windows(10, 3, 4) == std::vector<int>({0, 4}));
}
