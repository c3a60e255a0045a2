[x] > f
  [] (42.div x > @) > inner
  inner > @
stdout ((f 6).as-string)
