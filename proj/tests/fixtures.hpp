#pragma once

#include <string>

#include "liftmmap/logic.hpp"
#include "liftmmap/parse.hpp"

namespace fixtures {

inline liftmmap::MLN fs(int persons = 5) {
  return liftmmap::parse_mln("domain person " + std::to_string(persons) + R"(
predicate Smokes(person)
predicate Cancer(person)
predicate Friend(person, person)
max: Smokes, Cancer
sum: Friend
1.5 Smokes(x) => Cancer(x)
1.1 Smokes(x) ^ Friend(x, y) => Smokes(y)
)");
}

// Frnds(X,Y) ^ Parent(Z,X) => Knows(Z,Y); Knows(U,V).
inline liftmmap::MLN m1(int size = 2, double w1 = 0.7, double w2 = -0.4) {
  const std::string n = std::to_string(size);
  return liftmmap::parse_mln("domain a " + n + "\ndomain b " + n + "\ndomain c " + n + R"(
predicate Frnds(a, b)
predicate Parent(c, a)
predicate Knows(c, b)
max: Frnds, Knows
sum: Parent
)" + std::to_string(w1) + " Frnds(x, y) ^ Parent(z, x) => Knows(z, y)\n" +
                             std::to_string(w2) + " Knows(u, v)\n");
}

inline liftmmap::MLN student(int scale = 1) {
  auto d = [&](int base) { return std::to_string(base * scale); };
  return liftmmap::parse_mln("domain teacher " + d(2) + "\ndomain course " + d(3) +
                             "\ndomain company " + d(4) + "\ndomain student " + d(6) + R"(
predicate Teaches(teacher, course)
predicate Takes(student, course)
predicate JobOffer(student, company)
max: Takes, JobOffer
sum: Teaches
1 Teaches(t, c) ^ Takes(s, c) => JobOffer(s, m)
)");
}

}  // namespace fixtures
