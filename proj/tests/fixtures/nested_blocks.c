int level;

void *deep(void *arg) {
  {
    {
      level = level + 1;
    }
  }
  return 0;
}

int main() {
  pthread_t t;
  pthread_create(&t, 0, deep, 0);
  {
    int local = 3;
    {
      level = local;
    }
  }
  pthread_join(t, 0);
  return level;
}
